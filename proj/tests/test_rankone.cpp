#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secbf/rankone.hpp"
#include "test_helpers.hpp"

using namespace secbf;

namespace {

// oracle: evaluate the trace conditions on the output directly
void check_traces(const CVector& x, const DecompositionRequest& req, double tol) {
    for (const CMatrix& g : req.gs) {
        const double want = trace_prod(g, req.X);
        const double got = quad_form(x, g);
        CHECK(std::abs(got - want) <= tol * (1.0 + std::abs(want)));
    }
}

}  // namespace

TEST_CASE("already rank one returns the factor up to a global phase") {
    auto g = testgen::rng(1);
    CVector v = testgen::random_cvector(4, g);
    DecompositionRequest req;
    req.X = outer(v, v);
    req.gs = {identity(4), testgen::random_hermitian(4, g)};
    CVector x = decompose(req);
    check_traces(x, req, 1e-9);
    // alignment: |<x,v>| = ||x|| ||v||
    const double cosine = std::abs(inner(x, v)) / std::sqrt(x.norm2_sq() * v.norm2_sq());
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("isotropic X with the identity condition preserves total power") {
    DecompositionRequest req;
    req.X = identity(3);
    req.X *= cxd(1.0 / 3.0);
    req.gs = {identity(3)};
    CVector x = decompose(req);
    CHECK(x.norm2_sq() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random rank-3 requests with four conditions match all traces") {
    auto g = testgen::rng(42);
    for (int rep = 0; rep < 30; ++rep) {
        DecompositionRequest req;
        req.X = testgen::random_psd(4, 3, g);
        for (int i = 0; i < 4; ++i) req.gs.push_back(testgen::random_hermitian(4, g));
        req.seed = 1000 + rep;
        CVector x = decompose(req);
        check_traces(x, req, 1e-8);

        // rank >= 3 keeps the output inside Range(X)
        EigResult e = herm_eig(req.X);
        CVector proj(4);
        for (int k = 0; k < 3; ++k) {
            CVector base(4);
            for (std::size_t i = 0; i < 4; ++i) base[i] = e.vectors(i, k);
            proj += inner(base, x) * base;
        }
        const double resid = std::sqrt((x - proj).norm2_sq() / x.norm2_sq());
        CHECK(resid <= 1e-7);
    }
}

TEST_CASE("rank-2 core with four conditions uses the auxiliary direction") {
    auto g = testgen::rng(77);
    int successes = 0;
    for (int rep = 0; rep < 10; ++rep) {
        DecompositionRequest req;
        req.X = testgen::random_psd(5, 2, g);
        for (int i = 0; i < 4; ++i) req.gs.push_back(testgen::random_hermitian(5, g));
        req.seed = 31 + rep;
        CVector x = decompose(req);
        check_traces(x, req, 1e-7);
        ++successes;
    }
    CHECK(successes == 10);
}

TEST_CASE("three conditions resolve fully in range") {
    auto g = testgen::rng(88);
    for (int rep = 0; rep < 10; ++rep) {
        DecompositionRequest req;
        req.X = testgen::random_psd(4, 2 + rep % 3, g);
        for (int i = 0; i < 3; ++i) req.gs.push_back(testgen::random_hermitian(4, g));
        req.seed = rep;
        CVector x = decompose(req);
        check_traces(x, req, 1e-8);
    }
}

TEST_CASE("power preservation when the identity is a condition") {
    auto g = testgen::rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        DecompositionRequest req;
        req.X = testgen::random_psd(4, 3, g);
        req.gs = {identity(4)};
        for (int i = 0; i < 3; ++i) req.gs.push_back(testgen::random_hermitian(4, g));
        req.seed = rep;
        CVector x = decompose(req);
        const double want = trace_real(req.X);
        CHECK(std::abs(x.norm2_sq() - want) <= 1e-7 * (1.0 + want));
    }
}

TEST_CASE("invalid requests are rejected") {
    DecompositionRequest req;
    req.X = zeros(3, 3);
    req.gs = {identity(3)};
    CHECK_THROWS(decompose(req));  // zero X

    req.X = identity(2);
    req.gs = {identity(2)};
    CHECK_THROWS(decompose(req));  // n < 3

    req.X = identity(3);
    req.gs = {};
    CHECK_THROWS(decompose(req));  // no conditions

    req.gs = {identity(3), identity(3), identity(3), identity(3), identity(3)};
    CHECK_THROWS(decompose(req));  // too many conditions
}
