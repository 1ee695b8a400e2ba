#ifndef SECBF_SCHEMES_HPP
#define SECBF_SCHEMES_HPP

#include <optional>
#include <vector>

#include "secbf/channel.hpp"
#include "secbf/linalg.hpp"
#include "secbf/rates.hpp"
#include "secbf/sdp.hpp"

// End-to-end minimum-power secure beamforming designs. The underlay solver
// grid-searches an SINR target beta1 and solves one small SDP per point;
// the cooperative solver alternates user and relay steps, each a small SDP
// plus a rank-one recovery, until the total power settles.

namespace secbf {

struct Requirements {
    double qp = 0.5;  // PU secrecy-rate floor, bits/s/Hz
    double qs = 1.0;  // SU information-rate floor, bits/s/Hz
};

struct SearchConfig {
    double beta_ub = 0.0;    // 0 = derive from channel scale
    int grid_points = 100;   // M
    int max_alt_iters = 50;
    double conv_tol = 1e-4;  // relative power change per alternating step
    int retries = 3;         // relay re-initializations / SDP perturb retries
    int refine_rounds = 12;  // local zoom after the coarse beta1 pass
    std::uint64_t seed = 0;  // drives generic-position choices in recovery
    bool parallel_grid = true;
};

enum class SolveStatus { Optimal, Infeasible };

struct GridPoint {
    double beta = 0.0;
    SdpStatus sdp_status = SdpStatus::NumericalFailure;
    double sdp_value = 0.0;  // relaxed objective, when solved
    double power = 0.0;      // recovered rank-one power, when solved
};

struct UnderlaySolution {
    SolveStatus status = SolveStatus::Infeasible;
    CVector w1, w2;
    double beta1_star = 0.0;
    double total_power = 0.0;
    double relaxed_value = 0.0;  // SDP value at beta1_star
    RateReport rates;
    std::vector<GridPoint> grid_trace;
};

struct CooperativeSolution {
    SolveStatus status = SolveStatus::Infeasible;
    CVector w1, w2;
    CMatrix F;
    double beta2_star = 0.0;
    double total_power = 0.0;
    double relaxed_value = 0.0;  // final user-step SDP value (given the pre-step relay matrix)
    RateReport rates;
    PowerReport powers;
    int iterations = 0;
    std::vector<double> power_history;
};

// ----- underlay -----

struct UnderlayMatrices {
    CMatrix pu_sinr;    // blkdiag(hpp hpp^H, -beta1 hsp hsp^H)
    CMatrix su_rate;    // blkdiag(-(2^Qs-1) hps hps^H, hss hss^H)
    CMatrix eavesdrop;  // blkdiag(hps hps^H, 0)
    double rhs_pu_sinr = 0.0;
    double rhs_su_rate = 0.0;
    double rhs_eavesdrop_cap = 0.0;
};

UnderlayMatrices build_underlay_matrices(const ChannelSet& cs, double qp, double qs, double beta1);

UnderlaySolution solve_underlay(const ChannelSet& cs, const Requirements& req, const SearchConfig& sc);

// ----- cooperative -----

struct CoopUserMatrices {
    CMatrix power_weight;  // blkdiag(H0^H F^H F H0 + I, I)
    CMatrix secrecy;       // blkdiag(V, 0)
    CMatrix su_rate;       // blkdiag(-H0^H F^H hss hss^H F H0, hss hss^H/(4^Qs-1)); empty when Qs=0
    CMatrix interference;  // blkdiag(0, hsp hsp^H)
    double rhs_secrecy = 0.0;
    double rhs_su_rate = 0.0;
    double rhs_interference = 0.0;
    bool has_su_rate = true;  // the SU-rate constraint is dropped entirely at Qs=0
};

CoopUserMatrices build_coop_user_matrices(const ChannelSet& cs, const CMatrix& F, double qp,
                                          double qs, double beta2);

struct CoopUserStep {
    bool feasible = false;
    CVector w1, w2;
    double beta2 = 0.0;
    double objective = 0.0;  // recovered w^H A1 w
    double sdp_value = 0.0;
    std::vector<GridPoint> grid_trace;
};

// One user step with the relay matrix held fixed. extra_beta2, when given,
// is evaluated alongside the regular grid (the alternating loop passes the
// previous iterate's interference level so it never loses feasibility).
CoopUserStep coop_user_step(const ChannelSet& cs, const CMatrix& F, const Requirements& req,
                            const SearchConfig& sc, std::optional<double> extra_beta2 = {});

struct CoopRelayMatrices {
    CMatrix power_weight;  // (H0 w1 w1^H H0^H + s2 I)^T kron I
    CMatrix secrecy;       // (H0 w1 w1^H H0^H - s2 Omega I)^T kron (hsp hsp^H)
    CMatrix su_leak;       // (H0 w1 w1^H H0^H + s2 I)^T kron (hss hss^H); empty when Qs=0
    double omega = 0.0;
    double rhs_secrecy = 0.0;
    double rhs_su_leak = 0.0;  // may be negative: no relay matrix can satisfy the SU rate
    bool has_su_leak = true;
};

CoopRelayMatrices build_coop_relay_matrices(const ChannelSet& cs, const CVector& w1,
                                            const CVector& w2, double qp, double qs);

struct CoopRelayStep {
    bool feasible = false;
    CMatrix F;
    double sdp_value = 0.0;
};

CoopRelayStep coop_relay_step(const ChannelSet& cs, const CVector& w1, const CVector& w2,
                              const Requirements& req, double sdp_tol, std::uint64_t seed);

CooperativeSolution solve_cooperative(const ChannelSet& cs, const Requirements& req,
                                      const SearchConfig& sc,
                                      std::optional<CMatrix> f_init = {});

// Shared helper: solve with one eased-RHS retry after a numerical failure.
SdpSolution solve_with_retry(SdpProblem p, double tol);

}  // namespace secbf

#endif
