#ifndef SECBF_RANKONE_HPP
#define SECBF_RANKONE_HPP

#include <cstdint>
#include <vector>

#include "secbf/linalg.hpp"

// Hermitian rank-one decomposition: given a PSD X (n >= 3) and up to four
// Hermitian matrices G_i, produce a vector x with x^H G_i x = tr(G_i X).
// The SDR pipelines rely on this to recover beamformers from relaxed
// solutions without losing optimality.

namespace secbf {

struct DecompositionRequest {
    CMatrix X;                 // Hermitian PSD, n x n, n >= 3, nonzero
    std::vector<CMatrix> gs;   // 1..4 Hermitian n x n
    double tol = 1e-7;         // relative trace-matching tolerance
    std::uint64_t seed = 0;    // drives the generic-position choices
    int retries = 5;
};

// Constructive procedure: (a) factor X into V V^H on its numerical range,
// (b) while the factor rank allows it, pick a traceless-against-all-G_i
// Hermitian direction and shift the factor Gram matrix along it until a
// rank drop, (c) finish a residual rank-2 core inside the 3-dimensional
// space spanned by the factor and one auxiliary direction (taken from
// Range(X) when rank(X) >= 3, otherwise from its complement).
// Throws std::invalid_argument on malformed input and std::runtime_error
// when trace matching is not achieved after the bounded retries.
CVector decompose(const DecompositionRequest& req);

}  // namespace secbf

#endif
