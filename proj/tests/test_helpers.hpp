#ifndef SECBF_TEST_HELPERS_HPP
#define SECBF_TEST_HELPERS_HPP

#include <random>

#include "secbf/linalg.hpp"

// Shared generators for randomized tests. All draws are seeded so that
// failures reproduce.

namespace secbf::testgen {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double unit_normal(std::mt19937_64& g) {
    static thread_local std::normal_distribution<double> d(0.0, 1.0);
    return d(g);
}

inline cxd random_cx(std::mt19937_64& g) { return {unit_normal(g), unit_normal(g)}; }

inline CVector random_cvector(std::size_t n, std::mt19937_64& g) {
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = random_cx(g);
    return v;
}

inline CMatrix random_cmatrix(std::size_t r, std::size_t c, std::mt19937_64& g) {
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = random_cx(g);
    return m;
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& g) {
    return hermitize(random_cmatrix(n, n, g));
}

// PSD with the given rank: sum of r random rank-one terms.
inline CMatrix random_psd(std::size_t n, std::size_t rank, std::mt19937_64& g) {
    CMatrix x = zeros(n, n);
    for (std::size_t k = 0; k < rank; ++k) {
        CVector v = random_cvector(n, g);
        x += outer(v, v);
    }
    return hermitize(x);
}

}  // namespace secbf::testgen

#endif
