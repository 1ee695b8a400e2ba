#include "realsym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace secbf::detail {

void mul(const RMat& a, const RMat& b, RMat& c) {
    const int n = a.n;
    if (c.n != n) c = RMat(n);
    std::fill(c.a.begin(), c.a.end(), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.a[static_cast<std::size_t>(k) * n];
            double* crow = &c.a[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
}

void mul_tn(const RMat& a, const RMat& b, RMat& c) {
    const int n = a.n;
    if (c.n != n) c = RMat(n);
    std::fill(c.a.begin(), c.a.end(), 0.0);
    for (int k = 0; k < n; ++k) {
        const double* arow = &a.a[static_cast<std::size_t>(k) * n];
        const double* brow = &b.a[static_cast<std::size_t>(k) * n];
        for (int i = 0; i < n; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = &c.a[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) crow[j] += aki * brow[j];
        }
    }
}

void mul_nt(const RMat& a, const RMat& b, RMat& c) {
    const int n = a.n;
    if (c.n != n) c = RMat(n);
    for (int i = 0; i < n; ++i) {
        const double* arow = &a.a[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            const double* brow = &b.a[static_cast<std::size_t>(j) * n];
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += arow[k] * brow[k];
            c.at(i, j) = s;
        }
    }
}

namespace {

// Householder reduction to tridiagonal form; on exit `a` holds the
// accumulated orthogonal transform.
void tred2(int n, double* a, double* d, double* e) {
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(a[i * n + k]);
            if (scale == 0.0) {
                e[i] = a[i * n + l];
            } else {
                for (int k = 0; k <= l; ++k) {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                double f = a[i * n + l];
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    a[j * n + i] = a[i * n + j] / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
                    for (int k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a[i * n + j];
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) a[j * n + k] -= (f * e[k] + g * a[i * n + k]);
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += a[i * n + k] * a[k * n + j];
                for (int k = 0; k <= l; ++k) a[k * n + j] -= g * a[k * n + i];
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for (int j = 0; j <= l; ++j) a[j * n + i] = a[i * n + j] = 0.0;
    }
}

// Implicit QL with shifts on the tridiagonal (d, e); transforms are
// accumulated into z (columns become eigenvectors).
void tql2(int n, double* d, double* e, double* z) {
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("sym_eig: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + ((g >= 0.0) ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SymEig sym_eig(const RMat& m) {
    const int n = m.n;
    SymEig out;
    out.values.assign(n, 0.0);
    out.vectors = m;
    if (n == 1) {
        out.values[0] = m.a[0];
        out.vectors.a[0] = 1.0;
        return out;
    }
    std::vector<double> e(n, 0.0);
    tred2(n, out.vectors.a.data(), out.values.data(), e.data());
    tql2(n, out.values.data(), e.data(), out.vectors.a.data());

    // sort ascending, reorder columns
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return out.values[x] < out.values[y]; });
    SymEig sorted;
    sorted.values.resize(n);
    sorted.vectors = RMat(n);
    for (int k = 0; k < n; ++k) {
        sorted.values[k] = out.values[order[k]];
        for (int i = 0; i < n; ++i) sorted.vectors.at(i, k) = out.vectors.at(i, order[k]);
    }
    return sorted;
}

bool cholesky(const RMat& a, RMat& lower) {
    const int n = a.n;
    if (lower.n != n) lower = RMat(n);
    std::fill(lower.a.begin(), lower.a.end(), 0.0);
    for (int j = 0; j < n; ++j) {
        double d = a.at(j, j);
        for (int k = 0; k < j; ++k) d -= lower.at(j, k) * lower.at(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        lower.at(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a.at(i, j);
            for (int k = 0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
            lower.at(i, j) = s / lower.at(j, j);
        }
    }
    return true;
}

void chol_solve(const RMat& lower, const std::vector<double>& rhs, std::vector<double>& x) {
    const int n = lower.n;
    x = rhs;
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= lower.at(i, k) * x[k];
        x[i] = s / lower.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= lower.at(k, i) * x[k];
        x[i] = s / lower.at(i, i);
    }
}

}  // namespace secbf::detail
