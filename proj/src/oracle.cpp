#include "secbf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "secbf/rates.hpp"

namespace secbf {

namespace {

bool feasible_at(const ChannelSet& cs, const Requirements& req, const CVector& u1,
                 const CVector& u2, double scale) {
    const double a = std::sqrt(scale);
    CVector w1 = cxd(a) * u1;
    CVector w2 = cxd(a) * u2;
    RateReport rr = underlay_rates(cs, w1, w2);
    return rr.secrecy_rate_pu >= req.qp && rr.info_rate_su >= req.qs;
}

// Smallest verified-feasible total power along one direction pair, if any:
// a log-spaced bracket scan followed by bisection toward the lower edge.
std::optional<double> direction_min_power(const ChannelSet& cs, const Requirements& req,
                                          const CVector& u1, const CVector& u2) {
    const double lo = 1e-8, hi = 1e8;
    const int scan_points = 60;
    double t_feas = -1.0, t_infeas = lo;
    for (int k = 0; k < scan_points; ++k) {
        const double t = lo * std::pow(hi / lo, static_cast<double>(k) / (scan_points - 1));
        if (feasible_at(cs, req, u1, u2, t)) {
            t_feas = t;
            break;
        }
        t_infeas = t;
    }
    if (t_feas < 0.0) return std::nullopt;
    for (int it = 0; it < 40; ++it) {
        const double mid = std::sqrt(t_feas * t_infeas);  // geometric bisection
        if (feasible_at(cs, req, u1, u2, mid)) t_feas = mid;
        else t_infeas = mid;
    }
    return t_feas;  // ||w1||^2 + ||w2||^2 = t for unit-norm (u1,u2)
}

}  // namespace

std::optional<double> random_search_underlay(const ChannelSet& cs, const Requirements& req,
                                             std::size_t num_samples, std::uint64_t seed,
                                             bool parallel) {
    cs.validate();
    if (num_samples < 1) throw std::invalid_argument("random_search_underlay: need >= 1 sample");
    if (req.qp <= 0.0 && req.qs <= 0.0) return 0.0;

    const std::size_t chunk = 512;
    const std::size_t n_chunks = (num_samples + chunk - 1) / chunk;
    std::vector<double> chunk_best(n_chunks, std::numeric_limits<double>::infinity());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long c = 0; c < static_cast<long>(n_chunks); ++c) {  // NOLINT
        std::mt19937_64 rng(mix_seed(seed, 0xA11CE + c));
        std::normal_distribution<double> nd(0.0, 1.0);
        const std::size_t count = std::min(chunk, num_samples - static_cast<std::size_t>(c) * chunk);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < count; ++s) {
            CVector u1(cs.np()), u2(cs.ns());
            double norm2 = 0.0;
            for (std::size_t i = 0; i < cs.np(); ++i) {
                u1[i] = {nd(rng), nd(rng)};
                norm2 += std::norm(u1[i]);
            }
            for (std::size_t i = 0; i < cs.ns(); ++i) {
                u2[i] = {nd(rng), nd(rng)};
                norm2 += std::norm(u2[i]);
            }
            const double inv = 1.0 / std::sqrt(norm2);
            u1 *= cxd(inv);
            u2 *= cxd(inv);
            std::optional<double> p = direction_min_power(cs, req, u1, u2);
            if (p && *p < best) best = *p;
        }
        chunk_best[c] = best;
    }
    (void)parallel;

    double best = std::numeric_limits<double>::infinity();
    for (double v : chunk_best) best = std::min(best, v);
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

namespace {

void push_violation(std::vector<std::string>& out, const std::string& name, double residual,
                    double tol) {
    if (residual <= tol) return;
    std::ostringstream ss;
    ss << name << " residual " << residual;
    out.push_back(ss.str());
}

}  // namespace

OracleReport verify_solution(const ChannelSet& cs, const Requirements& req,
                             const UnderlaySolution& sol, double tol,
                             std::optional<double> oracle_power) {
    OracleReport rep;
    rep.solver_power = sol.total_power;
    rep.best_feasible_power = oracle_power;
    if (sol.status != SolveStatus::Optimal) {
        rep.violations.push_back("solution status is not Optimal");
        return rep;
    }
    RateReport rr = underlay_rates(cs, sol.w1, sol.w2);
    PowerReport pw = underlay_power(sol.w1, sol.w2);
    push_violation(rep.violations, "pu_secrecy_rate", req.qp - rr.secrecy_rate_pu, 1e-4);
    push_violation(rep.violations, "su_info_rate", req.qs - rr.info_rate_su, 1e-4);
    push_violation(rep.violations, "reported_power", std::abs(pw.total - sol.total_power),
                   tol * (1.0 + pw.total));
    push_violation(rep.violations, "reported_secrecy_rate",
                   std::abs(rr.secrecy_rate_pu - sol.rates.secrecy_rate_pu), tol);
    push_violation(rep.violations, "reported_su_rate",
                   std::abs(rr.info_rate_su - sol.rates.info_rate_su), tol);

    const bool lower_ok = sol.total_power >= sol.relaxed_value - 1e-6 * (1.0 + sol.relaxed_value);
    bool upper_ok = true;
    if (rep.best_feasible_power)
        upper_ok = sol.total_power <= *rep.best_feasible_power + 1e-9;
    rep.sandwich_ok = lower_ok && upper_ok && rep.violations.empty();
    return rep;
}

OracleReport verify_solution(const ChannelSet& cs, const Requirements& req,
                             const CooperativeSolution& sol, double tol) {
    OracleReport rep;
    rep.solver_power = sol.total_power;
    if (sol.status != SolveStatus::Optimal) {
        rep.violations.push_back("solution status is not Optimal");
        return rep;
    }
    RateReport rr = coop_rates(cs, sol.w1, sol.w2, sol.F, 1);
    PowerReport pw = coop_powers(cs, sol.w1, sol.w2, sol.F);
    push_violation(rep.violations, "pu_secrecy_rate", req.qp - rr.secrecy_rate_pu, 1e-4);
    push_violation(rep.violations, "su_info_rate", req.qs - rr.info_rate_su, 1e-4);
    push_violation(rep.violations, "reported_power", std::abs(pw.total - sol.total_power),
                   tol * (1.0 + pw.total));
    push_violation(rep.violations, "reported_secrecy_rate",
                   std::abs(rr.secrecy_rate_pu - sol.rates.secrecy_rate_pu), tol);
    for (std::size_t i = 1; i < sol.power_history.size(); ++i)
        push_violation(rep.violations, "monotone_power_history",
                       sol.power_history[i] - sol.power_history[i - 1],
                       1e-6 * (1.0 + sol.power_history[i - 1]));
    // no global brute-force bound for the cooperative scheme: the sandwich
    // degenerates to constraint satisfaction
    rep.sandwich_ok = rep.violations.empty();
    return rep;
}

}  // namespace secbf
