#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secbf/rates.hpp"
#include "test_helpers.hpp"

using namespace secbf;

namespace {

ChannelSet tiny_channels() {
    ChannelSet cs;
    cs.sigma2 = 1.0;
    cs.H0 = zeros(2, 2);
    cs.hpp = CVector{1.0, 0.0};
    cs.hsp = CVector{0.0, 0.0};
    cs.hps = CVector{0.0, 0.0};
    cs.hss = CVector{1.0, 0.0};
    return cs;
}

ChannelSet random_channels(std::mt19937_64& g, std::size_t np = 3, std::size_t ns = 2) {
    ChannelSet cs;
    cs.sigma2 = 1.0;
    cs.H0 = testgen::random_cmatrix(ns, np, g);
    cs.hpp = testgen::random_cvector(np, g);
    cs.hsp = testgen::random_cvector(ns, g);
    cs.hps = testgen::random_cvector(np, g);
    cs.hss = testgen::random_cvector(ns, g);
    return cs;
}

}  // namespace

TEST_CASE("underlay rate basics") {
    ChannelSet cs = tiny_channels();

    // no primary signal -> zero secrecy rate
    RateReport r0 = underlay_rates(cs, CVector{0.0, 0.0}, CVector{0.5, 0.0});
    CHECK(r0.secrecy_rate_pu == 0.0);

    // clean channel: log2(2) = 1
    RateReport r1 = underlay_rates(cs, CVector{1.0, 0.0}, CVector{0.0, 0.0});
    CHECK(r1.secrecy_rate_pu == doctest::Approx(1.0));
    CHECK(r1.info_rate_su == 0.0);
    CHECK(!r1.gamma_p.has_value());

    // stronger eavesdropper than main link -> clamp at zero
    ChannelSet cs2 = tiny_channels();
    cs2.hps = CVector{10.0, 0.0};
    RateReport r2 = underlay_rates(cs2, CVector{1.0, 0.0}, CVector{0.0, 0.0});
    CHECK(r2.secrecy_rate_pu == 0.0);
}

TEST_CASE("cooperative rate basics") {
    auto g = testgen::rng(2);
    ChannelSet cs = random_channels(g);
    CVector w1 = testgen::random_cvector(3, g);
    CVector w2 = testgen::random_cvector(2, g);

    // silent relay and silent SU: direct path only
    RateReport r = coop_rates(cs, w1, CVector{0.0, 0.0}, zeros(2, 2), 1);
    const double direct = std::norm(inner(cs.hpp, w1)) / cs.sigma2;
    CHECK(*r.gamma_p == doctest::Approx(direct).epsilon(1e-12));

    // no primary transmission
    RateReport rz = coop_rates(cs, CVector{0.0, 0.0, 0.0}, w2, identity(2), 1);
    CHECK(*rz.gamma_e == 0.0);
    CHECK(*rz.gamma_p == 0.0);
    CHECK(rz.secrecy_rate_pu == 0.0);

    // interference cancellation (a=0) can only help the SU
    CMatrix f = testgen::random_cmatrix(2, 2, g);
    RateReport ra1 = coop_rates(cs, w1, w2, f, 1);
    RateReport ra0 = coop_rates(cs, w1, w2, f, 0);
    CHECK(*ra0.gamma_s > *ra1.gamma_s);
    CHECK_THROWS(coop_rates(cs, w1, w2, f, 2));
}

TEST_CASE("colluding eavesdropper stacks both secondary channels") {
    auto g = testgen::rng(3);
    ChannelSet cs = random_channels(g, 4, 3);
    CMatrix he = eavesdropper_stack(cs);
    CHECK(he.rows() == 4);  // Ns + 1
    CHECK(he.cols() == 4);
    CVector w1 = testgen::random_cvector(4, g);
    RateReport r = coop_rates(cs, w1, CVector{0.0, 0.0, 0.0}, zeros(3, 3), 1);
    const double expect = ((cs.H0 * w1).norm2_sq() + std::norm(inner(cs.hps, w1))) / cs.sigma2;
    CHECK(*r.gamma_e == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cooperative powers") {
    auto g = testgen::rng(4);
    ChannelSet cs = random_channels(g, 3, 2);
    CVector w1 = testgen::random_cvector(3, g);
    CVector w2 = testgen::random_cvector(2, g);

    PowerReport p0 = coop_powers(cs, w1, w2, zeros(2, 2));
    CHECK(*p0.pr == 0.0);

    // noise amplification only: F = I, w1 = 0 -> Pr = sigma2 * Ns / 2
    PowerReport p1 = coop_powers(cs, CVector{0.0, 0.0, 0.0}, w2, identity(2));
    CHECK(*p1.pr == doctest::Approx(1.0));

    // trace formula equals the norm expansion
    CMatrix f = testgen::random_cmatrix(2, 2, g);
    PowerReport p2 = coop_powers(cs, w1, w2, f);
    double fro2 = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) fro2 += std::norm(f(i, j));
    const double expect = 0.5 * ((f * (cs.H0 * w1)).norm2_sq() + cs.sigma2 * fro2);
    CHECK(*p2.pr == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p2.total == doctest::Approx(*p2.pp + *p2.pr + *p2.ps).epsilon(1e-12));
}

TEST_CASE("underlay power is the squared norm sum") {
    CHECK(underlay_power(CVector{1.0, 0.0}, CVector{0.0, 1.0}).total == doctest::Approx(2.0));
    CHECK(underlay_power(CVector{0.0, 0.0}, CVector{0.0, 0.0}).total == 0.0);
    auto g = testgen::rng(5);
    CVector w1 = testgen::random_cvector(4, g);
    CVector w2 = testgen::random_cvector(3, g);
    double direct = 0.0;
    for (std::size_t i = 0; i < 4; ++i) direct += std::norm(w1[i]);
    for (std::size_t i = 0; i < 3; ++i) direct += std::norm(w2[i]);
    CHECK(underlay_power(w1, w2).total == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("scaling the primary beamformer never reduces the eavesdropper terms") {
    auto g = testgen::rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        ChannelSet cs = random_channels(g);
        CVector w1 = testgen::random_cvector(3, g);
        CVector w2 = testgen::random_cvector(2, g);
        CMatrix f = testgen::random_cmatrix(2, 2, g);
        RateReport base = coop_rates(cs, w1, w2, f, 1);
        CVector w1s = cxd(1.7) * w1;
        RateReport scaled = coop_rates(cs, w1s, w2, f, 1);
        CHECK(*scaled.gamma_e >= *base.gamma_e);
        const double eav_b = std::norm(inner(cs.hps, w1));
        const double eav_s = std::norm(inner(cs.hps, w1s));
        CHECK(eav_s >= eav_b);
    }
}

TEST_CASE("silent relay reduces the SU SINR to the direct ratio") {
    auto g = testgen::rng(7);
    ChannelSet cs = random_channels(g);
    CVector w1 = testgen::random_cvector(3, g);
    CVector w2 = testgen::random_cvector(2, g);
    RateReport r = coop_rates(cs, w1, w2, zeros(2, 2), 1);
    CHECK(*r.gamma_s == doctest::Approx(std::norm(inner(cs.hss, w2)) / cs.sigma2).epsilon(1e-12));
    CHECK(std::isfinite(r.secrecy_rate_pu));
    CHECK(std::isfinite(r.info_rate_su));
}

TEST_CASE("dimension mismatches are rejected") {
    auto g = testgen::rng(8);
    ChannelSet cs = random_channels(g);
    CHECK_THROWS(underlay_rates(cs, CVector{1.0}, CVector{1.0, 0.0}));
    CHECK_THROWS(coop_rates(cs, testgen::random_cvector(3, g), testgen::random_cvector(2, g),
                            zeros(3, 3), 1));
    CHECK_THROWS(coop_powers(cs, testgen::random_cvector(2, g), testgen::random_cvector(2, g),
                             zeros(2, 2)));
}
