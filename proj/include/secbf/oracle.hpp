#ifndef SECBF_ORACLE_HPP
#define SECBF_ORACLE_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "secbf/channel.hpp"
#include "secbf/schemes.hpp"

// Independent verification of solver outputs: a randomized brute-force
// feasibility search for the underlay scheme and constraint/sandwich checks
// for solutions of either scheme.

namespace secbf {

struct OracleReport {
    std::optional<double> best_feasible_power;
    std::size_t samples_tried = 0;
    double solver_power = 0.0;
    bool sandwich_ok = false;
    std::vector<std::string> violations;  // named constraint residuals
};

// Samples random beamformer directions, scales each along a log-spaced
// bracket plus bisection to the smallest verified-feasible total power,
// and returns the minimum over samples. Parallel over fixed-seed chunks,
// so the result does not depend on the thread count.
std::optional<double> random_search_underlay(const ChannelSet& cs, const Requirements& req,
                                             std::size_t num_samples, std::uint64_t seed,
                                             bool parallel = true);

// Recompute rates and powers from the returned beamformers and compare
// against the solution's claims; report-only. An oracle_power bound from
// random_search_underlay, when supplied, closes the upper half of the
// sandwich; the lower half uses the stored relaxed-SDP value.
OracleReport verify_solution(const ChannelSet& cs, const Requirements& req,
                             const UnderlaySolution& sol, double tol = 1e-6,
                             std::optional<double> oracle_power = {});
OracleReport verify_solution(const ChannelSet& cs, const Requirements& req,
                             const CooperativeSolution& sol, double tol = 1e-6);

}  // namespace secbf

#endif
