#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secbf/sdp.hpp"
#include "test_helpers.hpp"

using namespace secbf;

namespace {

// Independent brute-force reference: quadratic-penalty objective minimized
// by projected accelerated gradient descent over the PSD cone. Only used to
// cross-check solve(); shares nothing with the interior-point path.
double penalty_minimize(const SdpProblem& p, int stage_iters = 4000) {
    const std::size_t n = p.n;
    CMatrix x = identity(n);

    auto project_psd = [&](const CMatrix& m) {
        EigResult e = herm_eig(hermitize(m));
        CMatrix out = zeros(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            if (e.values[k] <= 0.0) continue;
            CVector v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
            out += cxd(e.values[k]) * outer(v, v);
        }
        return hermitize(out);
    };

    double a_norm2_sum = 0.0;
    for (const auto& con : p.constraints) {
        double f2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) f2 += std::norm(con.a(i, j));
        a_norm2_sum += f2;
    }

    for (double rho : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7}) {
        const double lips = p.objective.max_abs() * n + 2.0 * rho * a_norm2_sum;
        const double step = 1.0 / lips;
        CMatrix y = x;
        double t = 1.0;
        for (int it = 0; it < stage_iters; ++it) {
            CMatrix grad = p.objective;
            for (const auto& con : p.constraints) {
                const double val = trace_prod(con.a, y);
                double coef = 0.0;
                if (con.sense == Sense::GE) coef = -2.0 * rho * std::max(0.0, con.b - val);
                else if (con.sense == Sense::LE) coef = 2.0 * rho * std::max(0.0, val - con.b);
                else coef = 2.0 * rho * (val - con.b);
                if (coef != 0.0) grad += cxd(coef) * con.a;
            }
            CMatrix x_new = project_psd(y - cxd(step) * grad);
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x_new + cxd((t - 1.0) / t_new) * (x_new - x);
            x = x_new;
            t = t_new;
        }
    }
    return trace_prod(p.objective, x);
}

SdpProblem trace_ge_problem() {
    SdpProblem p;
    p.n = 2;
    p.objective = identity(2);
    p.constraints.push_back({identity(2), Sense::GE, 1.0});
    return p;
}

}  // namespace

TEST_CASE("min tr(X) with tr(X) >= 1 attains 1") {
    SdpSolution s = solve(trace_ge_problem(), 1e-8);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.duality_gap_estimate <= 1e-8);
}

TEST_CASE("min tr(diag(1,2) X) with tr(X) = 1 selects the smallest eigenvalue") {
    SdpProblem p;
    p.n = 2;
    p.objective = zeros(2, 2);
    p.objective(0, 0) = 1.0;
    p.objective(1, 1) = 2.0;
    p.constraints.push_back({identity(2), Sense::EQ, 1.0});
    SdpSolution s = solve(p, 1e-8);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(s.X(0, 0) - cxd(1.0)) <= 1e-6);
    CHECK(s.duality_gap_estimate <= 1e-8);
}

TEST_CASE("tr(-I X) >= 1 is infeasible") {
    SdpProblem p;
    p.n = 2;
    p.objective = identity(2);
    CMatrix negi = identity(2);
    negi *= cxd(-1.0);
    p.constraints.push_back({negi, Sense::GE, 1.0});
    SdpSolution s = solve(p, 1e-8);
    CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("unbounded objective is detected") {
    SdpProblem p;
    p.n = 2;
    CMatrix negi = identity(2);
    negi *= cxd(-1.0);
    p.objective = negi;
    p.constraints.push_back({identity(2), Sense::GE, 1.0});
    SdpSolution s = solve(p, 1e-8);
    CHECK(s.status == SdpStatus::Unbounded);
}

TEST_CASE("rank-one constraint with complex data has the analytic optimum") {
    auto g = testgen::rng(101);
    CVector h = testgen::random_cvector(3, g);
    SdpProblem p;
    p.n = 3;
    p.objective = identity(3);
    p.constraints.push_back({outer(h, h), Sense::GE, 1.0});
    SdpSolution s = solve(p, 1e-8);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(1.0 / h.norm2_sq()).epsilon(1e-6));
}

TEST_CASE("random strictly feasible problems match the penalty brute force") {
    auto g = testgen::rng(555);
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t n = 3 + rep % 3;  // 3..5
        SdpProblem p;
        p.n = n;
        p.objective = testgen::random_psd(n, n, g) + identity(n);
        CMatrix x0 = testgen::random_psd(n, n, g) + identity(n);
        const int m = 2 + rep % 3;  // 2..4
        for (int i = 0; i < m; ++i) {
            CMatrix a = testgen::random_hermitian(n, g);
            const double val = trace_prod(a, x0);
            if (i % 2 == 0) p.constraints.push_back({a, Sense::GE, val - 1.0});
            else p.constraints.push_back({a, Sense::LE, val + 1.0});
        }
        SdpSolution s = solve(p, 1e-8);
        REQUIRE(s.status == SdpStatus::Optimal);
        const double ref = penalty_minimize(p);
        CHECK(std::abs(s.objective_value - ref) <= 1e-3 * (1.0 + std::abs(ref)));
        // weak duality
        CHECK(s.dual_objective_value <= s.objective_value + 1e-6 * (1.0 + std::abs(s.objective_value)));
        // PSD of the returned X
        EigResult e = herm_eig(s.X);
        CHECK(e.values.back() >= -1e-8 * (1.0 + std::max(0.0, e.values.front())));
        CHECK(s.max_constraint_violation <= 1e-7);
    }
}

TEST_CASE("solving twice is deterministic") {
    auto g = testgen::rng(77);
    SdpProblem p;
    p.n = 4;
    p.objective = testgen::random_psd(4, 4, g) + identity(4);
    CMatrix x0 = testgen::random_psd(4, 3, g) + identity(4);
    for (int i = 0; i < 3; ++i) {
        CMatrix a = testgen::random_hermitian(4, g);
        p.constraints.push_back({a, Sense::GE, trace_prod(a, x0) - 0.5});
    }
    SdpSolution s1 = solve(p, 1e-8);
    SdpSolution s2 = solve(p, 1e-8);
    REQUIRE(s1.status == SdpStatus::Optimal);
    REQUIRE(s2.status == SdpStatus::Optimal);
    CHECK(std::abs(s1.objective_value - s2.objective_value) <= 1e-9);
}

TEST_CASE("complex-to-real embedding keeps traces consistent") {
    auto g = testgen::rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        CMatrix a = testgen::random_hermitian(4, g);
        CMatrix x = testgen::random_psd(4, 4, g);
        CMatrix ae = embed_hermitian(a);
        CMatrix xe = embed_hermitian(x);
        const double lhs = trace_prod(a, x);
        const double rhs = 0.5 * trace_prod(ae, xe);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("problem validation rejects malformed input") {
    SdpProblem p;
    p.n = 2;
    p.objective = identity(2);
    CHECK_THROWS(p.validate());  // empty constraints
    p.constraints.push_back({identity(2), Sense::GE, 1.0});
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS(solve(p, 1.0));  // tol out of range
    CMatrix bad = zeros(2, 2);
    bad(0, 1) = 1.0;
    p.constraints.push_back({bad, Sense::GE, 0.0});
    CHECK_THROWS(p.validate());
}
