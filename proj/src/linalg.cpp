#include "secbf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace secbf {

double CVector::norm2_sq() const {
    double s = 0.0;
    for (const cxd& z : v_) s += std::norm(z);
    return s;
}

CVector& CVector::operator*=(cxd s) {
    for (cxd& z : v_) z *= s;
    return *this;
}

CVector& CVector::operator+=(const CVector& o) {
    if (o.size() != size()) throw std::invalid_argument("CVector +=: length mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

CVector& CVector::operator-=(const CVector& o) {
    if (o.size() != size()) throw std::invalid_argument("CVector -=: length mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::transpose() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMatrix CMatrix::conj() const {
    CMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(i, j) = std::conj((*this)(i, j));
    return r;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const cxd& z : a_) m = std::max(m, std::abs(z));
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("CMatrix +=: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("CMatrix -=: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cxd s) {
    for (cxd& z : a_) z *= s;
    return *this;
}

CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("CMatrix *: shape mismatch");
    CMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cxd aik = a(i, k);
            if (aik == cxd(0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

CMatrix operator*(cxd s, CMatrix a) { return a *= s; }

CVector operator*(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("CMatrix*CVector: shape mismatch");
    CVector r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cxd s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        r[i] = s;
    }
    return r;
}

CVector operator+(CVector a, const CVector& b) { return a += b; }
CVector operator-(CVector a, const CVector& b) { return a -= b; }
CVector operator*(cxd s, CVector a) { return a *= s; }

CMatrix outer(const CVector& a, const CVector& b) {
    CMatrix r(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r(i, j) = a[i] * std::conj(b[j]);
    return r;
}

cxd inner(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    double dev = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
    return dev <= tol * (1.0 + m.max_abs());
}

CMatrix hermitize(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitize: square matrix required");
    CMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return r;
}

double quad_form(const CVector& w, const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() != w.size())
        throw std::invalid_argument("quad_form: dimension mismatch");
    if (!is_hermitian(m)) throw std::invalid_argument("quad_form: matrix not Hermitian");
    cxd s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cxd row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * w[j];
        s += std::conj(w[i]) * row;
    }
    if (std::abs(s.imag()) > 1e-9 * (1.0 + std::abs(s.real())))
        throw std::runtime_error("quad_form: imaginary residue above tolerance");
    return s.real();
}

double trace_prod(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw std::invalid_argument("trace_prod: shape mismatch");
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
    return s.real();
}

double trace_real(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace_real: square matrix required");
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s.real();
}

EigResult herm_eig(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("herm_eig: square matrix required");
    if (!is_hermitian(m)) throw std::invalid_argument("herm_eig: matrix not Hermitian");
    const std::size_t n = m.rows();

    CMatrix a = hermitize(m);
    CMatrix v = identity(n);

    const double scale = std::max(1.0, a.max_abs());
    const int max_sweeps = 60;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-14 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cxd apq = a(p, q);
                const double alpha = std::abs(apq);
                if (alpha <= 1e-300) continue;
                const cxd phase = apq / alpha;  // apq = alpha * phase
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double zeta = (aqq - app) / (2.0 * alpha);
                double t;
                if (std::abs(zeta) > 1e150) {
                    t = 1.0 / (2.0 * zeta);
                } else {
                    t = ((zeta >= 0.0) ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                }
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                const cxd spq = s * phase;        // rotation entry R(p,q)
                const cxd sqp = -s * std::conj(phase);

                // A <- R^H A R on rows/cols p,q
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == p || j == q) continue;
                    const cxd apj = a(p, j);
                    const cxd aqj = a(q, j);
                    a(p, j) = c * apj - spq * aqj;
                    a(q, j) = -sqp * apj + c * aqj;
                    a(j, p) = std::conj(a(p, j));
                    a(j, q) = std::conj(a(q, j));
                }
                a(p, p) = app - t * alpha;
                a(q, q) = aqq + t * alpha;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t j = 0; j < n; ++j) {
                    const cxd vjp = v(j, p);
                    const cxd vjq = v(j, q);
                    v(j, p) = c * vjp + sqp * vjq;
                    v(j, q) = spq * vjp + c * vjq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off > 1e-11 * scale) throw std::runtime_error("herm_eig: Jacobi iteration did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    EigResult r;
    r.values.resize(n);
    r.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        r.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

std::size_t numerical_rank(const CMatrix& m, double tol) {
    EigResult e = herm_eig(m);
    const double lmax = e.values.empty() ? 0.0 : std::max(0.0, e.values.front());
    if (lmax == 0.0) {
        // all eigenvalues <= 0; a zero matrix has rank 0, anything negative is non-PSD
        for (double lv : e.values)
            if (lv < -tol * std::max(1e-300, std::abs(e.values.front())))
                throw std::invalid_argument("numerical_rank: matrix not PSD");
        bool all_zero = true;
        for (double lv : e.values)
            if (std::abs(lv) > 0.0) all_zero = all_zero && std::abs(lv) <= tol;
        return 0;
    }
    std::size_t rank = 0;
    for (double lv : e.values) {
        if (lv < -tol * lmax) throw std::invalid_argument("numerical_rank: matrix not PSD");
        if (lv > tol * lmax) ++rank;
    }
    return rank;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cxd aij = a(i, j);
            if (aij == cxd(0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

CVector vec(const CMatrix& a) {
    CVector f(a.rows() * a.cols());
    std::size_t idx = 0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) f[idx++] = a(i, j);
    return f;
}

CMatrix unvec(const CVector& f, std::size_t rows, std::size_t cols) {
    if (f.size() != rows * cols) throw std::invalid_argument("unvec: length mismatch");
    CMatrix a(rows, cols);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = f[idx++];
    return a;
}

CMatrix blkdiag2(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw std::invalid_argument("blkdiag2: square blocks required");
    CMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
    return r;
}

}  // namespace secbf
