#ifndef SECBF_SDP_HPP
#define SECBF_SDP_HPP

#include <vector>

#include "secbf/linalg.hpp"

// Dense complex-Hermitian SDP:  min tr(C X)  s.t.  tr(A_i X) {>=,<=,=} b_i,
// X PSD. Solved by a homogeneous self-dual primal-dual path-following
// interior-point method with Nesterov-Todd scaling, run on the 2n x 2n
// real-symmetric embedding [[Re, -Im], [Im, Re]] of each Hermitian matrix.

namespace secbf {

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

enum class Sense { GE, LE, EQ };

struct SdpConstraint {
    CMatrix a;    // Hermitian n x n
    Sense sense = Sense::GE;
    double b = 0.0;
};

struct SdpProblem {
    std::size_t n = 0;
    CMatrix objective;  // Hermitian n x n
    std::vector<SdpConstraint> constraints;

    void validate() const;  // throws on non-Hermitian data, dimension mismatch, empty constraints
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    CMatrix X;                           // Hermitian PSD when Optimal
    double objective_value = 0.0;        // tr(C X)
    double dual_objective_value = 0.0;
    double max_constraint_violation = 0.0;
    double duality_gap_estimate = 0.0;   // relative complementarity gap
    int iterations = 0;
};

// tol in [1e-12, 1e-4]; defaults documented in the header of sdp.cpp.
SdpSolution solve(const SdpProblem& p, double tol = 1e-8);

// Real-symmetric embedding of a Hermitian matrix, returned with zero
// imaginary parts so tests can compare tr(AX) against tr(A_hat X_hat)/2.
CMatrix embed_hermitian(const CMatrix& m);

}  // namespace secbf

#endif
