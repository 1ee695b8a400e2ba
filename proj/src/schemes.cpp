#include "secbf/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "secbf/rankone.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace secbf {

namespace {

constexpr double kSdpTol = 1e-8;
constexpr double kBetaFloorEps = 1e-6;

std::pair<CVector, CVector> split_beamformer(const CVector& w, std::size_t np) {
    CVector w1(np), w2(w.size() - np);
    for (std::size_t i = 0; i < np; ++i) w1[i] = w[i];
    for (std::size_t i = np; i < w.size(); ++i) w2[i - np] = w[i];
    return {w1, w2};
}

double fro_norm_sq(const CMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
    return s;
}

CMatrix scaled_outer(const CVector& v, double s) {
    CMatrix m = outer(v, v);
    m *= cxd(s);
    return m;
}

}  // namespace

SdpSolution solve_with_retry(SdpProblem p, double tol) {
    SdpSolution sol = solve(p, tol);
    if (sol.status != SdpStatus::NumericalFailure) return sol;
    for (SdpConstraint& c : p.constraints) {
        const double eps = 1e-9 * (1.0 + std::abs(c.b));
        if (c.sense == Sense::GE) c.b -= eps;
        else if (c.sense == Sense::LE) c.b += eps;
    }
    return solve(p, tol);
}

// ----- underlay -----

UnderlayMatrices build_underlay_matrices(const ChannelSet& cs, double qp, double qs, double beta1) {
    if (beta1 <= 0.0) throw std::invalid_argument("build_underlay_matrices: beta1 must be positive");
    cs.validate();
    const double s2 = cs.sigma2;
    const double su_gap = std::pow(2.0, qs) - 1.0;

    UnderlayMatrices um;
    um.pu_sinr = blkdiag2(outer(cs.hpp, cs.hpp), scaled_outer(cs.hsp, -beta1));
    um.su_rate = blkdiag2(scaled_outer(cs.hps, -su_gap), outer(cs.hss, cs.hss));
    um.eavesdrop = blkdiag2(outer(cs.hps, cs.hps), zeros(cs.ns(), cs.ns()));
    um.rhs_pu_sinr = beta1 * s2;
    um.rhs_su_rate = su_gap * s2;
    um.rhs_eavesdrop_cap = s2 * ((1.0 + beta1) / std::pow(2.0, qp) - 1.0);
    return um;
}

namespace {

struct UnderlayEval {
    GridPoint gp;
    CVector w1, w2;
    bool recovered = false;
};

UnderlayEval eval_underlay_beta(const ChannelSet& cs, const Requirements& req, double beta1,
                                std::uint64_t seed) {
    UnderlayEval ev;
    ev.gp.beta = beta1;
    UnderlayMatrices um = build_underlay_matrices(cs, req.qp, req.qs, beta1);
    const std::size_t n = cs.np() + cs.ns();

    SdpProblem p;
    p.n = n;
    p.objective = identity(n);
    p.constraints.push_back({um.pu_sinr, Sense::GE, um.rhs_pu_sinr});
    p.constraints.push_back({um.su_rate, Sense::GE, um.rhs_su_rate});
    p.constraints.push_back({um.eavesdrop, Sense::LE, um.rhs_eavesdrop_cap});

    SdpSolution sol = solve_with_retry(p, kSdpTol);
    ev.gp.sdp_status = sol.status;
    if (sol.status != SdpStatus::Optimal) return ev;
    ev.gp.sdp_value = sol.objective_value;

    DecompositionRequest dr;
    dr.X = sol.X;
    dr.gs = {identity(n), um.pu_sinr, um.su_rate, um.eavesdrop};
    dr.tol = 1e-7;
    dr.seed = seed;
    try {
        CVector x = decompose(dr);
        auto [w1, w2] = split_beamformer(x, cs.np());
        ev.w1 = std::move(w1);
        ev.w2 = std::move(w2);
        ev.gp.power = x.norm2_sq();
        ev.recovered = true;
    } catch (const std::runtime_error&) {
        ev.gp.sdp_status = SdpStatus::NumericalFailure;
    }
    return ev;
}

std::vector<UnderlayEval> eval_underlay_batch(const ChannelSet& cs, const Requirements& req,
                                              const std::vector<double>& betas,
                                              std::uint64_t seed_base, bool parallel) {
    std::vector<UnderlayEval> out(betas.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long i = 0; i < static_cast<long>(betas.size()); ++i)  // NOLINT
        out[i] = eval_underlay_beta(cs, req, betas[i], mix_seed(seed_base, 1000 + i));
    (void)parallel;
    return out;
}

}  // namespace

UnderlaySolution solve_underlay(const ChannelSet& cs, const Requirements& req,
                                const SearchConfig& sc) {
    cs.validate();
    if (req.qp < 0.0 || req.qs < 0.0) throw std::invalid_argument("solve_underlay: negative targets");
    UnderlaySolution out;

    if (req.qp <= 0.0 && req.qs <= 0.0) {
        out.status = SolveStatus::Optimal;
        out.w1 = CVector(cs.np());
        out.w2 = CVector(cs.ns());
        out.rates = underlay_rates(cs, out.w1, out.w2);
        return out;
    }

    const double lo = std::pow(2.0, req.qp) - 1.0 + kBetaFloorEps;
    double ub = sc.beta_ub;
    if (ub <= 0.0)
        ub = std::pow(4.0, req.qp) * (1.0 + 100.0 * cs.hpp.norm2_sq() / cs.sigma2);
    ub = std::max(ub, lo);
    const int m_pts = std::max(2, sc.grid_points);

    std::vector<double> betas(m_pts);
    for (int i = 0; i < m_pts; ++i)
        betas[i] = lo + (ub - lo) * static_cast<double>(i) / (m_pts - 1);

    std::vector<UnderlayEval> evals = eval_underlay_batch(cs, req, betas, sc.seed, sc.parallel_grid);

    const UnderlayEval* best = nullptr;
    for (const UnderlayEval& ev : evals) {
        out.grid_trace.push_back(ev.gp);
        if (ev.recovered && (!best || ev.gp.power < best->gp.power)) best = &ev;
    }
    if (!best) {
        out.status = SolveStatus::Infeasible;
        return out;
    }

    // local zoom around the best coarse point; the evaluated set only grows,
    // so the returned point never loses to the plain grid minimum
    UnderlayEval champion = *best;
    double spacing = (m_pts > 1) ? (ub - lo) / (m_pts - 1) : 0.0;
    double bl = std::max(lo, champion.gp.beta - spacing);
    double bh = champion.gp.beta + spacing;
    for (int round = 0; round < sc.refine_rounds && bh - bl > 1e-12 * (1.0 + champion.gp.beta); ++round) {
        const double width = bh - bl;
        std::vector<double> cand(6);
        for (int k = 0; k < 6; ++k) cand[k] = bl + width * (k + 1) / 7.0;
        std::vector<UnderlayEval> revals =
            eval_underlay_batch(cs, req, cand, mix_seed(sc.seed, 77000 + round), sc.parallel_grid);
        for (UnderlayEval& ev : revals) {
            out.grid_trace.push_back(ev.gp);
            if (ev.recovered && ev.gp.power < champion.gp.power) champion = std::move(ev);
        }
        const double hw = width * 1.5 / 7.0;
        bl = std::max(lo, champion.gp.beta - hw);
        bh = champion.gp.beta + hw;
    }

    out.status = SolveStatus::Optimal;
    out.w1 = champion.w1;
    out.w2 = champion.w2;
    out.beta1_star = champion.gp.beta;
    out.total_power = champion.gp.power;
    out.relaxed_value = champion.gp.sdp_value;
    out.rates = underlay_rates(cs, out.w1, out.w2);
    return out;
}

// ----- cooperative -----

CoopUserMatrices build_coop_user_matrices(const ChannelSet& cs, const CMatrix& F, double qp,
                                          double qs, double beta2) {
    if (beta2 < 0.0) throw std::invalid_argument("build_coop_user_matrices: beta2 must be >= 0");
    cs.validate();
    if (F.rows() != cs.ns() || F.cols() != cs.ns())
        throw std::invalid_argument("build_coop_user_matrices: F must be Ns x Ns");
    const double s2 = cs.sigma2;
    const std::size_t np = cs.np(), ns = cs.ns();
    const double pu_gap = std::pow(4.0, qp);

    const CMatrix fh0 = F * cs.H0;                  // Ns x Np
    const CVector fh_sp = F.adjoint() * cs.hsp;     // F^H hsp
    const CVector fh_ss = F.adjoint() * cs.hss;     // F^H hss
    const CVector relay_sp = fh0.adjoint() * cs.hsp;  // H0^H F^H hsp
    const CVector relay_ss = fh0.adjoint() * cs.hss;  // H0^H F^H hss

    CoopUserMatrices cm;
    cm.power_weight = blkdiag2(hermitize(fh0.adjoint() * fh0) + identity(np), identity(ns));

    const CMatrix he = eavesdropper_stack(cs);
    CMatrix v = hermitize(outer(cs.hpp, cs.hpp) - cxd(pu_gap) * (he.adjoint() * he));
    v *= cxd(1.0 / s2);
    const double denom = beta2 + s2 * (1.0 + fh_sp.norm2_sq());
    v += scaled_outer(relay_sp, 1.0 / denom);
    cm.secrecy = blkdiag2(hermitize(v), zeros(ns, ns));
    cm.rhs_secrecy = pu_gap - 1.0;

    cm.has_su_rate = qs > 0.0;
    if (cm.has_su_rate) {
        const double su_gap = std::pow(4.0, qs) - 1.0;
        cm.su_rate = blkdiag2(scaled_outer(relay_ss, -1.0), scaled_outer(cs.hss, 1.0 / su_gap));
        cm.rhs_su_rate = s2 * (1.0 + fh_ss.norm2_sq());
    }

    cm.interference = blkdiag2(zeros(np, np), outer(cs.hsp, cs.hsp));
    cm.rhs_interference = beta2;
    return cm;
}

namespace {

struct CoopUserEval {
    GridPoint gp;
    CVector w1, w2;
    bool recovered = false;
};

CoopUserEval eval_coop_user_beta(const ChannelSet& cs, const CMatrix& F, const Requirements& req,
                                 double beta2, std::uint64_t seed) {
    CoopUserEval ev;
    ev.gp.beta = beta2;
    CoopUserMatrices cm = build_coop_user_matrices(cs, F, req.qp, req.qs, beta2);
    const std::size_t n = cs.np() + cs.ns();

    SdpProblem p;
    p.n = n;
    p.objective = cm.power_weight;
    p.constraints.push_back({cm.secrecy, Sense::GE, cm.rhs_secrecy});
    if (cm.has_su_rate) p.constraints.push_back({cm.su_rate, Sense::GE, cm.rhs_su_rate});
    p.constraints.push_back({cm.interference, Sense::LE, cm.rhs_interference});

    SdpSolution sol = solve_with_retry(p, kSdpTol);
    ev.gp.sdp_status = sol.status;
    if (sol.status != SdpStatus::Optimal) return ev;
    ev.gp.sdp_value = sol.objective_value;

    DecompositionRequest dr;
    dr.X = sol.X;
    dr.gs = {cm.power_weight, cm.secrecy};
    if (cm.has_su_rate) dr.gs.push_back(cm.su_rate);
    dr.gs.push_back(cm.interference);
    dr.tol = 1e-7;
    dr.seed = seed;
    try {
        CVector x = decompose(dr);
        auto [w1, w2] = split_beamformer(x, cs.np());
        ev.w1 = std::move(w1);
        ev.w2 = std::move(w2);
        ev.gp.power = quad_form(x, cm.power_weight);
        ev.recovered = true;
    } catch (const std::runtime_error&) {
        ev.gp.sdp_status = SdpStatus::NumericalFailure;
    }
    return ev;
}

}  // namespace

CoopUserStep coop_user_step(const ChannelSet& cs, const CMatrix& F, const Requirements& req,
                            const SearchConfig& sc, std::optional<double> extra_beta2) {
    cs.validate();
    double ub = sc.beta_ub;
    if (ub <= 0.0) ub = 100.0 * cs.sigma2;
    const int m_pts = std::max(2, sc.grid_points);

    std::vector<double> betas(m_pts);
    for (int i = 0; i < m_pts; ++i) betas[i] = ub * static_cast<double>(i) / (m_pts - 1);
    if (extra_beta2 && *extra_beta2 >= 0.0) betas.push_back(*extra_beta2);

    std::vector<CoopUserEval> evals(betas.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (sc.parallel_grid)
#endif
    for (long i = 0; i < static_cast<long>(betas.size()); ++i)  // NOLINT
        evals[i] = eval_coop_user_beta(cs, F, req, betas[i], mix_seed(sc.seed, 2000 + i));

    CoopUserStep out;
    const CoopUserEval* best = nullptr;
    for (const CoopUserEval& ev : evals) {
        out.grid_trace.push_back(ev.gp);
        if (ev.recovered && (!best || ev.gp.power < best->gp.power)) best = &ev;
    }
    if (!best) return out;
    out.feasible = true;
    out.w1 = best->w1;
    out.w2 = best->w2;
    out.beta2 = best->gp.beta;
    out.objective = best->gp.power;
    out.sdp_value = best->gp.sdp_value;
    return out;
}

CoopRelayMatrices build_coop_relay_matrices(const ChannelSet& cs, const CVector& w1,
                                            const CVector& w2, double qp, double qs) {
    cs.validate();
    if (w1.size() != cs.np() || w2.size() != cs.ns())
        throw std::invalid_argument("build_coop_relay_matrices: beamformer dimension mismatch");
    const double s2 = cs.sigma2;
    const std::size_t ns = cs.ns();
    const double pu_gap = std::pow(4.0, qp);

    const CMatrix he = eavesdropper_stack(cs);
    const CVector he_w1 = he * w1;
    CoopRelayMatrices rm;
    rm.omega = pu_gap - 1.0 +
               (pu_gap * he_w1.norm2_sq() - std::norm(inner(cs.hpp, w1))) / s2;

    const CVector h0w1 = cs.H0 * w1;
    const CMatrix base = outer(h0w1, h0w1);  // H0 w1 w1^H H0^H
    CMatrix shift_pos = base + cxd(s2) * identity(ns);
    CMatrix shift_neg = base - cxd(s2 * rm.omega) * identity(ns);

    rm.power_weight = hermitize(kron(shift_pos.transpose(), identity(ns)));
    rm.secrecy = hermitize(kron(shift_neg.transpose(), outer(cs.hsp, cs.hsp)));
    rm.rhs_secrecy = rm.omega * (std::norm(inner(cs.hsp, w2)) + s2);

    rm.has_su_leak = qs > 0.0;
    if (rm.has_su_leak) {
        rm.su_leak = hermitize(kron(shift_pos.transpose(), outer(cs.hss, cs.hss)));
        rm.rhs_su_leak = std::norm(inner(cs.hss, w2)) / (std::pow(4.0, qs) - 1.0) - s2;
    }
    return rm;
}

CoopRelayStep coop_relay_step(const ChannelSet& cs, const CVector& w1, const CVector& w2,
                              const Requirements& req, double sdp_tol, std::uint64_t seed) {
    CoopRelayStep out;
    CoopRelayMatrices rm = build_coop_relay_matrices(cs, w1, w2, req.qp, req.qs);
    if (rm.has_su_leak && rm.rhs_su_leak < 0.0) return out;  // SU rate unsatisfiable for any F

    const std::size_t ns = cs.ns();
    const std::size_t n = ns * ns;
    SdpProblem p;
    p.n = n;
    p.objective = rm.power_weight;
    p.constraints.push_back({rm.secrecy, Sense::GE, rm.rhs_secrecy});
    if (rm.has_su_leak) p.constraints.push_back({rm.su_leak, Sense::LE, rm.rhs_su_leak});

    SdpSolution sol = solve_with_retry(p, sdp_tol);
    if (sol.status != SdpStatus::Optimal) return out;
    out.sdp_value = sol.objective_value;

    if (trace_real(sol.X) <= 1e-12 * (1.0 + std::abs(sol.objective_value))) {
        out.feasible = true;
        out.F = zeros(ns, ns);  // relay stays silent
        return out;
    }

    DecompositionRequest dr;
    dr.X = sol.X;
    dr.gs = {rm.power_weight, rm.secrecy};
    if (rm.has_su_leak) dr.gs.push_back(rm.su_leak);
    dr.tol = 1e-7;
    dr.seed = seed;
    try {
        CVector f = decompose(dr);
        out.F = unvec(f, ns, ns);
        out.feasible = true;
    } catch (const std::runtime_error&) {
        out.feasible = false;
    }
    return out;
}

CooperativeSolution solve_cooperative(const ChannelSet& cs, const Requirements& req,
                                      const SearchConfig& sc, std::optional<CMatrix> f_init) {
    cs.validate();
    if (req.qp < 0.0 || req.qs < 0.0) throw std::invalid_argument("solve_cooperative: negative targets");
    const std::size_t ns = cs.ns();
    CooperativeSolution out;
    out.F = zeros(ns, ns);

    if (req.qp <= 0.0 && req.qs <= 0.0) {
        out.status = SolveStatus::Optimal;
        out.w1 = CVector(cs.np());
        out.w2 = CVector(ns);
        out.rates = coop_rates(cs, out.w1, out.w2, out.F, 1);
        out.powers = coop_powers(cs, out.w1, out.w2, out.F);
        return out;
    }

    const int init_attempts = f_init ? 1 : 1 + std::max(0, sc.retries);
    for (int attempt = 0; attempt < init_attempts; ++attempt) {
        CMatrix f = f_init ? *f_init : identity(ns);
        if (!f_init && attempt > 0) {
            std::mt19937_64 rng(mix_seed(sc.seed, 7000 + attempt));
            std::normal_distribution<double> nd(0.0, 1.0);
            f = CMatrix(ns, ns);
            for (std::size_t i = 0; i < ns; ++i)
                for (std::size_t j = 0; j < ns; ++j) f(i, j) = {nd(rng), nd(rng)};
            const double fn = std::sqrt(fro_norm_sq(f));
            f *= cxd(1.0 / fn);
        }

        CoopUserStep step = coop_user_step(cs, f, req, sc, {});
        if (!step.feasible) continue;

        CVector w1 = step.w1, w2 = step.w2;
        double beta2 = step.beta2;
        double sdp_value = step.sdp_value;
        std::vector<double> history;
        double prev_power = std::numeric_limits<double>::infinity();
        int iters = 0;

        for (int t = 0; t < std::max(1, sc.max_alt_iters); ++t) {
            CoopRelayStep rstep =
                coop_relay_step(cs, w1, w2, req, kSdpTol, mix_seed(sc.seed, 3000 + t));
            if (!rstep.feasible) break;  // keep the previous relay matrix
            f = rstep.F;
            const double power = coop_powers(cs, w1, w2, f).total;
            iters = t + 1;
            if (!history.empty() && power > history.back() + 1e-6 * (1.0 + history.back()))
                throw std::logic_error("solve_cooperative: total power increased along the iteration");
            history.push_back(power);
            if (std::abs(prev_power - power) <= sc.conv_tol * (1.0 + power)) {
                prev_power = power;
                break;
            }
            prev_power = power;
            if (t + 1 >= std::max(1, sc.max_alt_iters)) break;

            const double snap = quad_form(w2, outer(cs.hsp, cs.hsp));
            CoopUserStep next = coop_user_step(cs, f, req, sc, snap);
            if (!next.feasible) break;
            w1 = next.w1;
            w2 = next.w2;
            beta2 = next.beta2;
            sdp_value = next.sdp_value;
        }
        if (history.empty()) continue;

        out.status = SolveStatus::Optimal;
        out.w1 = w1;
        out.w2 = w2;
        out.F = f;
        out.beta2_star = beta2;
        out.total_power = history.back();
        out.relaxed_value = sdp_value;
        out.iterations = iters;
        out.power_history = std::move(history);
        out.rates = coop_rates(cs, out.w1, out.w2, out.F, 1);
        out.powers = coop_powers(cs, out.w1, out.w2, out.F);
        return out;
    }
    out.status = SolveStatus::Infeasible;
    return out;
}

}  // namespace secbf
