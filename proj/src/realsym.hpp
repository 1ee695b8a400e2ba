#ifndef SECBF_REALSYM_HPP
#define SECBF_REALSYM_HPP

#include <stdexcept>
#include <vector>

// Small dense real symmetric kernel backing the interior-point solver:
// row-major square matrices, Householder+QL eigensolver, Cholesky.

namespace secbf::detail {

struct RMat {
    int n = 0;
    std::vector<double> a;

    RMat() = default;
    explicit RMat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    void set_identity() {
        for (double& v : a) v = 0.0;
        for (int i = 0; i < n; ++i) at(i, i) = 1.0;
    }
    void scale(double s) {
        for (double& v : a) v *= s;
    }
    void axpy(double alpha, const RMat& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += alpha * o.a[i];
    }
    double inner(const RMat& o) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * o.a[i];
        return s;
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }
    void symmetrize() {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = 0.5 * (at(i, j) + at(j, i));
                at(i, j) = v;
                at(j, i) = v;
            }
    }
};

// c = a * b
void mul(const RMat& a, const RMat& b, RMat& c);
// c = a^T * b
void mul_tn(const RMat& a, const RMat& b, RMat& c);
// c = a * b^T
void mul_nt(const RMat& a, const RMat& b, RMat& c);

struct SymEig {
    std::vector<double> values;  // ascending
    RMat vectors;                // columns
};

// Eigendecomposition of a symmetric matrix (input is copied).
// Throws std::runtime_error if the QL iteration fails to converge.
SymEig sym_eig(const RMat& m);

// Lower Cholesky factor; returns false when a pivot is not positive.
bool cholesky(const RMat& a, RMat& lower);

// Solve A x = rhs with the Cholesky factor of A.
void chol_solve(const RMat& lower, const std::vector<double>& rhs, std::vector<double>& x);

}  // namespace secbf::detail

#endif
