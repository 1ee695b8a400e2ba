#ifndef SECBF_LINALG_HPP
#define SECBF_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

// Dense complex matrix/vector kernel used by every other component.
// Matrices are row-major; vectorization (vec/unvec) follows the
// column-stacking convention regardless of storage order.

namespace secbf {

using cxd = std::complex<double>;

class CVector {
  public:
    CVector() = default;
    explicit CVector(std::size_t n) : v_(n) {}
    CVector(std::initializer_list<cxd> init) : v_(init) {}
    explicit CVector(std::vector<cxd> v) : v_(std::move(v)) {}

    std::size_t size() const { return v_.size(); }
    cxd& operator[](std::size_t i) { return v_[i]; }
    const cxd& operator[](std::size_t i) const { return v_[i]; }
    const std::vector<cxd>& data() const { return v_; }
    std::vector<cxd>& data() { return v_; }

    double norm2_sq() const;                       // ||v||^2
    CVector& operator*=(cxd s);
    CVector& operator+=(const CVector& o);
    CVector& operator-=(const CVector& o);

  private:
    std::vector<cxd> v_;
};

class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cxd& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cxd& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    const std::vector<cxd>& data() const { return a_; }

    CMatrix adjoint() const;     // conjugate transpose
    CMatrix transpose() const;   // plain transpose
    CMatrix conj() const;
    double max_abs() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cxd s);

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cxd> a_;
};

CMatrix identity(std::size_t n);
CMatrix zeros(std::size_t rows, std::size_t cols);

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cxd s, CMatrix a);
CVector operator*(const CMatrix& a, const CVector& x);
CVector operator+(CVector a, const CVector& b);
CVector operator-(CVector a, const CVector& b);
CVector operator*(cxd s, CVector a);

// a b^H outer product
CMatrix outer(const CVector& a, const CVector& b);
// <a,b> = a^H b
cxd inner(const CVector& a, const CVector& b);

bool is_hermitian(const CMatrix& m, double tol = 1e-10);
// (M + M^H)/2
CMatrix hermitize(const CMatrix& m);

// w^H M w as a real number; throws if M is not Hermitian (by tolerance),
// dimensions mismatch, or the imaginary residue exceeds 1e-9*(1+|Re|).
double quad_form(const CVector& w, const CMatrix& m);

// Real trace of a Hermitian product tr(A B).
double trace_prod(const CMatrix& a, const CMatrix& b);
double trace_real(const CMatrix& a);

struct EigResult {
    std::vector<double> values;  // descending
    CMatrix vectors;             // columns are eigenvectors
};

// Hermitian eigendecomposition by cyclic Jacobi rotations.
// Postconditions: reconstruction residual <= 1e-8*(1+max|M|),
// eigenvectors orthonormal to 1e-8. Throws on non-Hermitian input or
// non-convergence.
EigResult herm_eig(const CMatrix& m);

// Number of eigenvalues > tol * lambda_max of a Hermitian PSD matrix.
// Throws if an eigenvalue falls below -tol*lambda_max.
std::size_t numerical_rank(const CMatrix& m, double tol = 1e-7);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Column-stacking vectorization and its inverse.
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& f, std::size_t rows, std::size_t cols);

// blkdiag of two square blocks (upper-left, lower-right).
CMatrix blkdiag2(const CMatrix& a, const CMatrix& b);

}  // namespace secbf

#endif
