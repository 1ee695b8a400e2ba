#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secbf/schemes.hpp"
#include "test_helpers.hpp"

using namespace secbf;

namespace {

ChannelSet default_channels(std::uint64_t seed, std::size_t np = 4, std::size_t ns = 2) {
    return sample_channels(Topology{}, np, ns, 1.0, seed);
}

SearchConfig quick_config() {
    SearchConfig sc;
    sc.grid_points = 40;
    sc.refine_rounds = 8;
    return sc;
}

}  // namespace

TEST_CASE("underlay matrices: structure and quadratic forms") {
    auto g = testgen::rng(10);
    ChannelSet cs = default_channels(101);
    const double beta1 = 2.0;
    UnderlayMatrices um = build_underlay_matrices(cs, 0.5, 1.0, beta1);

    CHECK(um.pu_sinr.rows() == 6);
    CHECK(is_hermitian(um.pu_sinr));
    CHECK(is_hermitian(um.su_rate));
    CHECK(is_hermitian(um.eavesdrop));

    // quadratic form against the direct rate expressions
    for (int rep = 0; rep < 10; ++rep) {
        CVector w1 = testgen::random_cvector(4, g);
        CVector w2 = testgen::random_cvector(2, g);
        CVector w(6);
        for (int i = 0; i < 4; ++i) w[i] = w1[i];
        for (int i = 0; i < 2; ++i) w[4 + i] = w2[i];
        const double lhs = quad_form(w, um.pu_sinr);
        const double rhs = std::norm(inner(cs.hpp, w1)) - beta1 * std::norm(inner(cs.hsp, w2));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        const double eav = quad_form(w, um.eavesdrop);
        CHECK(eav == doctest::Approx(std::norm(inner(cs.hps, w1))).epsilon(1e-9));
    }

    // Qs = 0 empties the upper block of the SU-rate matrix
    UnderlayMatrices um0 = build_underlay_matrices(cs, 0.5, 0.0, beta1);
    double upper = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) upper = std::max(upper, std::abs(um0.su_rate(i, j)));
    CHECK(upper == 0.0);
    CHECK(um0.rhs_su_rate == 0.0);
}

TEST_CASE("beta1 below the secrecy floor is infeasible") {
    ChannelSet cs = default_channels(77);
    const double qp = 1.0;  // floor: 2^1 - 1 = 1
    UnderlayMatrices um = build_underlay_matrices(cs, qp, 0.5, 0.5);
    CHECK(um.rhs_eavesdrop_cap < 0.0);
    SdpProblem p;
    p.n = 6;
    p.objective = identity(6);
    p.constraints.push_back({um.pu_sinr, Sense::GE, um.rhs_pu_sinr});
    p.constraints.push_back({um.su_rate, Sense::GE, um.rhs_su_rate});
    p.constraints.push_back({um.eavesdrop, Sense::LE, um.rhs_eavesdrop_cap});
    SdpSolution sol = solve(p, 1e-8);
    CHECK(sol.status == SdpStatus::Infeasible);
}

TEST_CASE("underlay: zero requirements cost zero power") {
    ChannelSet cs = default_channels(5);
    UnderlaySolution sol = solve_underlay(cs, {0.0, 0.0}, quick_config());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.total_power == 0.0);
    CHECK(sol.w1.norm2_sq() == 0.0);
    CHECK(sol.w2.norm2_sq() == 0.0);
}

TEST_CASE("underlay: solutions meet the rate targets and stay SDR-tight") {
    Requirements req{0.5, 1.0};
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        ChannelSet cs = default_channels(seed);
        UnderlaySolution sol = solve_underlay(cs, req, quick_config());
        REQUIRE(sol.status == SolveStatus::Optimal);

        RateReport rr = underlay_rates(cs, sol.w1, sol.w2);
        CHECK(rr.secrecy_rate_pu >= req.qp - 1e-4);
        CHECK(rr.info_rate_su >= req.qs - 1e-4);
        CHECK(std::abs(rr.secrecy_rate_pu - sol.rates.secrecy_rate_pu) <= 1e-6);

        const double direct = underlay_power(sol.w1, sol.w2).total;
        CHECK(std::abs(direct - sol.total_power) <= 1e-9 * (1.0 + direct));

        // every recovered grid point matches its relaxed value
        for (const GridPoint& gp : sol.grid_trace) {
            if (gp.sdp_status != SdpStatus::Optimal) continue;
            CHECK(std::abs(gp.power - gp.sdp_value) <= 1e-6 * (1.0 + std::abs(gp.sdp_value)));
        }
        CHECK(std::abs(sol.total_power - sol.relaxed_value) <=
              1e-6 * (1.0 + std::abs(sol.relaxed_value)));
    }
}

TEST_CASE("underlay: a denser grid never returns more power") {
    ChannelSet cs = default_channels(21);
    Requirements req{0.5, 1.0};
    SearchConfig coarse = quick_config();
    coarse.grid_points = 25;
    coarse.refine_rounds = 0;
    SearchConfig fine = coarse;
    fine.grid_points = 2 * coarse.grid_points - 1;  // superset of the coarse grid
    UnderlaySolution a = solve_underlay(cs, req, coarse);
    UnderlaySolution b = solve_underlay(cs, req, fine);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(b.total_power <= a.total_power + 1e-9 * (1.0 + a.total_power));
}

TEST_CASE("underlay: common phase rotation of all channels leaves the power unchanged") {
    ChannelSet cs = default_channels(31);
    Requirements req{0.5, 1.0};
    SearchConfig sc = quick_config();
    UnderlaySolution base = solve_underlay(cs, req, sc);

    const cxd phase = std::polar(1.0, 0.83);
    ChannelSet rot = cs;
    rot.H0 *= phase;
    rot.hpp *= phase;
    rot.hsp *= phase;
    rot.hps *= phase;
    rot.hss *= phase;
    UnderlaySolution turned = solve_underlay(rot, req, sc);
    REQUIRE(base.status == SolveStatus::Optimal);
    REQUIRE(turned.status == SolveStatus::Optimal);
    CHECK(std::abs(base.total_power - turned.total_power) <=
          1e-6 * (1.0 + base.total_power));
}

TEST_CASE("underlay: parallel and serial grid agree exactly") {
    ChannelSet cs = default_channels(41);
    Requirements req{0.5, 1.0};
    SearchConfig par = quick_config();
    par.parallel_grid = true;
    SearchConfig ser = par;
    ser.parallel_grid = false;
    UnderlaySolution a = solve_underlay(cs, req, par);
    UnderlaySolution b = solve_underlay(cs, req, ser);
    REQUIRE(a.status == SolveStatus::Optimal);
    CHECK(a.beta1_star == b.beta1_star);
    CHECK(a.total_power == b.total_power);
}

TEST_CASE("cooperative user matrices: silent relay and power identity") {
    auto g = testgen::rng(55);
    ChannelSet cs = default_channels(61);
    const CMatrix f0 = zeros(2, 2);
    CoopUserMatrices cm = build_coop_user_matrices(cs, f0, 0.5, 0.5, 1.0);

    // A1 reduces to the identity when the relay is off
    CHECK((cm.power_weight - identity(6)).max_abs() <= 1e-12);

    // V reduces to the direct-minus-eavesdropper form
    const CMatrix he = eavesdropper_stack(cs);
    CMatrix v_expect = outer(cs.hpp, cs.hpp) - cxd(std::pow(4.0, 0.5)) * (he.adjoint() * he);
    v_expect *= cxd(1.0 / cs.sigma2);
    v_expect = hermitize(v_expect);
    double dev = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) dev = std::max(dev, std::abs(cm.secrecy(i, j) - v_expect(i, j)));
    CHECK(dev <= 1e-10 * (1.0 + v_expect.max_abs()));

    // w^H A1 w equals the power bookkeeping identity for a random relay matrix
    CMatrix f = testgen::random_cmatrix(2, 2, g);
    CoopUserMatrices cmf = build_coop_user_matrices(cs, f, 0.5, 0.5, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        CVector w1 = testgen::random_cvector(4, g);
        CVector w2 = testgen::random_cvector(2, g);
        CVector w(6);
        for (int i = 0; i < 4; ++i) w[i] = w1[i];
        for (int i = 0; i < 2; ++i) w[4 + i] = w2[i];
        const double lhs = quad_form(w, cmf.power_weight);
        const double expect = (f * (cs.H0 * w1)).norm2_sq() + w1.norm2_sq() + w2.norm2_sq();
        CHECK(lhs == doctest::Approx(expect).epsilon(1e-9));
        PowerReport pr = coop_powers(cs, w1, w2, f);
        double fro2 = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) fro2 += std::norm(f(i, j));
        const double via_powers = 2.0 * (*pr.pp + *pr.pr) - cs.sigma2 * fro2 + 2.0 * (*pr.ps);
        CHECK(lhs == doctest::Approx(via_powers).epsilon(1e-9));
    }
}

TEST_CASE("cooperative user step: constraints echo and rates hold for the fixed relay") {
    ChannelSet cs = default_channels(71);
    Requirements req{0.5, 0.5};
    SearchConfig sc = quick_config();
    const CMatrix f = identity(2);
    CoopUserStep step = coop_user_step(cs, f, req, sc);
    REQUIRE(step.feasible);

    CoopUserMatrices cm = build_coop_user_matrices(cs, f, req.qp, req.qs, step.beta2);
    CVector w(6);
    for (int i = 0; i < 4; ++i) w[i] = step.w1[i];
    for (int i = 0; i < 2; ++i) w[4 + i] = step.w2[i];
    CHECK(quad_form(w, cm.interference) <= step.beta2 + 1e-7);
    CHECK(quad_form(w, cm.secrecy) >= std::pow(4.0, req.qp) - 1.0 - 1e-7);

    RateReport rr = coop_rates(cs, step.w1, step.w2, f, 1);
    CHECK(rr.secrecy_rate_pu >= req.qp - 1e-4);
    CHECK(rr.info_rate_su >= req.qs - 1e-4);
}

TEST_CASE("relay matrices: vectorized quadratic forms match direct evaluation") {
    auto g = testgen::rng(81);
    ChannelSet cs = default_channels(91);
    CVector w1 = testgen::random_cvector(4, g);
    CVector w2 = testgen::random_cvector(2, g);
    CoopRelayMatrices rm = build_coop_relay_matrices(cs, w1, w2, 0.5, 0.5);

    for (int rep = 0; rep < 10; ++rep) {
        CMatrix f = testgen::random_cmatrix(2, 2, g);
        CVector fv = vec(f);
        PowerReport pr = coop_powers(cs, w1, w2, f);
        CHECK(quad_form(fv, rm.power_weight) == doctest::Approx(2.0 * *pr.pr).epsilon(1e-9));

        const double direct = std::norm(inner(cs.hsp, f * (cs.H0 * w1))) -
                              cs.sigma2 * rm.omega * (f.adjoint() * cs.hsp).norm2_sq();
        CHECK(quad_form(fv, rm.secrecy) == doctest::Approx(direct).epsilon(1e-8));
    }

    CoopRelayMatrices rm0 = build_coop_relay_matrices(cs, CVector(4), w2, 0.5, 0.5);
    CHECK(rm0.omega == doctest::Approx(std::pow(4.0, 0.5) - 1.0));
}

TEST_CASE("relay step: recovered relay matrix honors both cooperative constraints") {
    ChannelSet cs = default_channels(111);
    Requirements req{0.5, 0.5};
    SearchConfig sc = quick_config();
    CoopUserStep step = coop_user_step(cs, identity(2), req, sc);
    REQUIRE(step.feasible);
    CoopRelayStep rstep = coop_relay_step(cs, step.w1, step.w2, req, 1e-8, 9);
    REQUIRE(rstep.feasible);
    RateReport rr = coop_rates(cs, step.w1, step.w2, rstep.F, 1);
    CHECK((1.0 + *rr.gamma_p) / (1.0 + *rr.gamma_e) >= std::pow(4.0, req.qp) - 1e-6);
    CHECK(*rr.gamma_s >= std::pow(4.0, req.qs) - 1.0 - 1e-6);
}

TEST_CASE("cooperative: zero requirements cost zero power") {
    ChannelSet cs = default_channels(121);
    CooperativeSolution sol = solve_cooperative(cs, {0.0, 0.0}, quick_config());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.total_power == 0.0);
}

TEST_CASE("cooperative: monotone power history and rate attainment") {
    Requirements req{0.5, 0.5};
    for (std::uint64_t seed : {131u, 132u}) {
        ChannelSet cs = default_channels(seed);
        CooperativeSolution sol = solve_cooperative(cs, req, quick_config());
        REQUIRE(sol.status == SolveStatus::Optimal);
        REQUIRE(!sol.power_history.empty());
        for (std::size_t i = 1; i < sol.power_history.size(); ++i)
            CHECK(sol.power_history[i] <=
                  sol.power_history[i - 1] + 1e-6 * (1.0 + sol.power_history[i - 1]));
        RateReport rr = coop_rates(cs, sol.w1, sol.w2, sol.F, 1);
        CHECK(rr.secrecy_rate_pu >= req.qp - 1e-4);
        CHECK(rr.info_rate_su >= req.qs - 1e-4);
        const double direct = coop_powers(cs, sol.w1, sol.w2, sol.F).total;
        CHECK(std::abs(direct - sol.total_power) <= 1e-9 * (1.0 + direct));
    }
}

TEST_CASE("cooperative: Qs=0 drops the SU-rate constraint") {
    ChannelSet cs = default_channels(141);
    CoopUserMatrices cm = build_coop_user_matrices(cs, identity(2), 0.5, 0.0, 1.0);
    CHECK(!cm.has_su_rate);
    CoopRelayMatrices rm = build_coop_relay_matrices(cs, CVector{1.0, 0.0, 0.0, 0.0},
                                                     CVector{1.0, 0.0}, 0.5, 0.0);
    CHECK(!rm.has_su_leak);
    CooperativeSolution sol = solve_cooperative(cs, {0.5, 0.0}, quick_config());
    REQUIRE(sol.status == SolveStatus::Optimal);
    RateReport rr = coop_rates(cs, sol.w1, sol.w2, sol.F, 1);
    CHECK(rr.secrecy_rate_pu >= 0.5 - 1e-4);
}

TEST_CASE("input validation") {
    ChannelSet cs = default_channels(1);
    CHECK_THROWS(build_underlay_matrices(cs, 0.5, 0.5, 0.0));
    CHECK_THROWS(build_coop_user_matrices(cs, identity(2), 0.5, 0.5, -1.0));
    CHECK_THROWS(build_coop_relay_matrices(cs, CVector(3), CVector(2), 0.5, 0.5));
    CHECK_THROWS(solve_underlay(cs, {-1.0, 0.0}, quick_config()));
}
