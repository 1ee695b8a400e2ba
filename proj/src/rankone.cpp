#include "secbf/rankone.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace secbf {

namespace {

struct Factor {
    CMatrix v;  // n x r, X_current = v v^H
    std::size_t r() const { return v.cols(); }
};

CVector column(const CMatrix& m, std::size_t j) {
    CVector c(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
    return c;
}

// Hermitian r x r from its real parameterization (diag, then Re/Im of the
// strict upper triangle).
CMatrix hermitian_from_coords(std::size_t r, const std::vector<double>& z) {
    CMatrix d(r, r);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < r; ++i) d(i, i) = z[idx++];
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            d(i, j) = {z[idx], z[idx + 1]};
            d(j, i) = std::conj(d(i, j));
            idx += 2;
        }
    return d;
}

// Real row of tr(M D) over the parameterization above.
std::vector<double> trace_row(const CMatrix& m) {
    const std::size_t r = m.rows();
    std::vector<double> row(r * r);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < r; ++i) row[idx++] = m(i, i).real();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            row[idx++] = 2.0 * m(i, j).real();
            row[idx++] = 2.0 * m(i, j).imag();
        }
    return row;
}

// Random unit combination of the nullspace of rows (m x d, m <= 4), or an
// empty vector when the nullspace is trivial. Plain Gaussian elimination
// with column pivoting on the tiny system.
std::vector<double> nullspace_sample(std::vector<std::vector<double>> rows, std::size_t dim,
                                     std::mt19937_64& rng) {
    const std::size_t m = rows.size();
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    std::vector<bool> used(dim, false);
    for (std::size_t i = 0; i < m; ++i) {
        // find largest pivot among unused columns in row `rank`
        double best = 0.0;
        std::size_t bc = dim;
        for (std::size_t c = 0; c < dim; ++c) {
            if (used[c]) continue;
            if (std::abs(rows[rank][c]) > best) {
                best = std::abs(rows[rank][c]);
                bc = c;
            }
        }
        if (bc == dim || best <= 1e-12) {
            // zero row: drop it
            rows.erase(rows.begin() + static_cast<long>(rank));
            if (rank >= rows.size()) break;
            --i;
            continue;
        }
        used[bc] = true;
        pivot_col.push_back(bc);
        const double p = rows[rank][bc];
        for (double& v : rows[rank]) v /= p;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k == rank) continue;
            const double f = rows[k][bc];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < dim; ++c) rows[k][c] -= f * rows[rank][c];
        }
        ++rank;
        if (rank >= rows.size()) break;
    }
    if (rank >= dim) return {};

    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> z(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c)
        if (!used[c]) z[c] = nd(rng);
    // back-substitute pivots so every row annihilates z
    for (std::size_t k = 0; k < rank; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c)
            if (c != pivot_col[k]) s += rows[k][c] * z[c];
        z[pivot_col[k]] = -s;
    }
    double norm = 0.0;
    for (double v : z) norm += v * v;
    norm = std::sqrt(norm);
    if (norm <= 1e-14) return {};
    for (double& v : z) v /= norm;
    return z;
}

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(attempt) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct GnResult {
    bool ok = false;
    std::array<cxd, 3> c{};
};

// Damped Gauss-Newton on the m residuals c^H N_i c - g_i over c in C^3.
GnResult gauss_newton_core(const std::vector<CMatrix>& ns, const std::vector<double>& targets,
                           std::array<cxd, 3> c0, double scale) {
    const std::size_t m = ns.size();
    std::array<cxd, 3> c = c0;
    auto residuals = [&](const std::array<cxd, 3>& cc, std::vector<double>& f) {
        f.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            cxd acc = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                cxd row = 0.0;
                for (std::size_t b = 0; b < 3; ++b) row += ns[i](a, b) * cc[b];
                acc += std::conj(cc[a]) * row;
            }
            f[i] = acc.real() - targets[i];
        }
    };
    auto norm_inf = [&](const std::vector<double>& f) {
        double v = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            v = std::max(v, std::abs(f[i]) / (1.0 + std::abs(targets[i])));
        return v;
    };

    std::vector<double> f;
    residuals(c, f);
    double best = norm_inf(f);
    double mu = 1e-10 * (1.0 + scale * scale);
    for (int it = 0; it < 80 && best > 1e-12; ++it) {
        // Jacobian rows: 2*[Re(N c); Im(N c)]
        std::vector<std::array<double, 6>> jac(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t a = 0; a < 3; ++a) {
                cxd row = 0.0;
                for (std::size_t b = 0; b < 3; ++b) row += ns[i](a, b) * c[b];
                jac[i][a] = 2.0 * row.real();
                jac[i][3 + a] = 2.0 * row.imag();
            }
        }
        bool stepped = false;
        for (int damp = 0; damp < 12 && !stepped; ++damp) {
            // solve (J J^T + mu I) lam = -f  (m x m)
            std::array<std::array<double, 5>, 4> sys{};
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < 6; ++k) s += jac[i][k] * jac[j][k];
                    sys[i][j] = s + ((i == j) ? mu : 0.0);
                }
                sys[i][m] = -f[i];
            }
            // gaussian elimination with partial pivoting
            bool singular = false;
            std::array<std::size_t, 4> perm{0, 1, 2, 3};
            for (std::size_t col = 0; col < m && !singular; ++col) {
                std::size_t piv = col;
                for (std::size_t rr = col + 1; rr < m; ++rr)
                    if (std::abs(sys[perm[rr]][col]) > std::abs(sys[perm[piv]][col])) piv = rr;
                std::swap(perm[col], perm[piv]);
                const double p = sys[perm[col]][col];
                if (std::abs(p) < 1e-300) {
                    singular = true;
                    break;
                }
                for (std::size_t rr = col + 1; rr < m; ++rr) {
                    const double fct = sys[perm[rr]][col] / p;
                    for (std::size_t cc = col; cc <= m; ++cc) sys[perm[rr]][cc] -= fct * sys[perm[col]][cc];
                }
            }
            std::array<double, 4> lam{};
            if (!singular) {
                for (std::size_t col = m; col-- > 0;) {
                    double s = sys[perm[col]][m];
                    for (std::size_t cc = col + 1; cc < m; ++cc) s -= sys[perm[col]][cc] * lam[cc];
                    lam[col] = s / sys[perm[col]][col];
                }
            } else {
                mu = std::max(mu * 10.0, 1e-8);
                continue;
            }
            std::array<double, 6> delta{};
            for (int k = 0; k < 6; ++k)
                for (std::size_t i = 0; i < m; ++i) delta[k] += jac[i][k] * lam[i];
            std::array<cxd, 3> cn;
            for (int a = 0; a < 3; ++a) cn[a] = c[a] + cxd(delta[a], delta[3 + a]);
            std::vector<double> fn;
            residuals(cn, fn);
            const double cand = norm_inf(fn);
            if (cand < best) {
                c = cn;
                f = fn;
                best = cand;
                mu = std::max(mu / 3.0, 1e-14);
                stepped = true;
            } else {
                mu = std::max(mu * 10.0, 1e-10);
            }
        }
        if (!stepped) break;
    }
    GnResult out;
    out.ok = best <= 1e-11;
    out.c = c;
    return out;
}

}  // namespace

CVector decompose(const DecompositionRequest& req) {
    const std::size_t n = req.X.rows();
    if (n < 3) throw std::invalid_argument("decompose: dimension must be >= 3");
    if (req.X.cols() != n) throw std::invalid_argument("decompose: X must be square");
    if (!is_hermitian(req.X)) throw std::invalid_argument("decompose: X not Hermitian");
    if (req.gs.empty() || req.gs.size() > 4)
        throw std::invalid_argument("decompose: need between 1 and 4 trace matrices");
    for (const CMatrix& g : req.gs) {
        if (g.rows() != n || g.cols() != n) throw std::invalid_argument("decompose: G dimension mismatch");
        if (!is_hermitian(g)) throw std::invalid_argument("decompose: G not Hermitian");
    }
    const std::size_t m = req.gs.size();

    EigResult ex = herm_eig(req.X);
    const double lmax = ex.values.empty() ? 0.0 : ex.values.front();
    if (lmax <= 0.0) throw std::invalid_argument("decompose: X is zero or not PSD");
    for (double lv : ex.values)
        if (lv < -1e-7 * lmax) throw std::invalid_argument("decompose: X not PSD");

    std::vector<double> targets(m);
    for (std::size_t i = 0; i < m; ++i) targets[i] = trace_prod(req.gs[i], req.X);
    double gscale = 0.0;
    for (double t : targets) gscale = std::max(gscale, std::abs(t));

    // numerical range of X, with a low cutoff so trace targets stay faithful
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < n; ++k)
        if (ex.values[k] > 1e-9 * lmax) keep.push_back(k);
    const std::size_t rank_x = keep.size();

    auto check = [&](const CVector& x) {
        for (std::size_t i = 0; i < m; ++i) {
            const double got = quad_form(x, req.gs[i]);
            if (std::abs(got - targets[i]) > req.tol * (1.0 + std::abs(targets[i]))) return false;
        }
        return true;
    };

    for (int attempt = 0; attempt <= req.retries; ++attempt) {
        std::mt19937_64 rng(attempt_seed(req.seed, attempt));
        CMatrix v(n, rank_x);
        for (std::size_t c = 0; c < rank_x; ++c) {
            const double s = std::sqrt(ex.values[keep[c]]);
            for (std::size_t i = 0; i < n; ++i) v(i, c) = s * ex.vectors(i, keep[c]);
        }

        bool degenerate = false;
        while (v.cols() >= 2 && !degenerate) {
            const std::size_t r = v.cols();
            std::vector<std::vector<double>> rows;
            rows.reserve(m);
            for (std::size_t i = 0; i < m; ++i)
                rows.push_back(trace_row(hermitize(v.adjoint() * req.gs[i] * v)));
            std::vector<double> z = nullspace_sample(rows, r * r, rng);
            if (z.empty()) break;  // no in-range direction left: rank-2 core with 4 conditions
            CMatrix delta = hermitian_from_coords(r, z);
            EigResult ed = herm_eig(delta);
            double ext = 0.0;
            for (double dv : ed.values)
                if (std::abs(dv) > std::abs(ext)) ext = dv;
            if (std::abs(ext) <= 1e-13) {
                degenerate = true;
                break;
            }
            const double t = -1.0 / ext;
            // columns of the shifted factor: sqrt(1 + t*delta_k) along delta's basis
            std::vector<std::size_t> alive;
            for (std::size_t k = 0; k < r; ++k) {
                const double nu = 1.0 + t * ed.values[k];
                if (nu > 1e-10) alive.push_back(k);
            }
            if (alive.empty() || alive.size() >= r) {
                degenerate = true;  // no clean rank drop; re-randomize the direction
                break;
            }
            CMatrix q(r, alive.size());
            for (std::size_t c = 0; c < alive.size(); ++c) {
                const double s = std::sqrt(1.0 + t * ed.values[alive[c]]);
                for (std::size_t i = 0; i < r; ++i) q(i, c) = s * ed.vectors(i, alive[c]);
            }
            v = v * q;
        }

        if (!degenerate && v.cols() == 1) {
            CVector x = column(v, 0);
            if (check(x)) return x;
            continue;
        }
        if (degenerate || v.cols() != 2) continue;

        // rank-2 core: work in span{p1, p2, y}
        CVector p1 = column(v, 0);
        CVector p2 = column(v, 1);
        CVector y(n);
        {
            std::normal_distribution<double> nd(0.0, 1.0);
            bool ok = false;
            for (int tries = 0; tries < 20 && !ok; ++tries) {
                if (rank_x >= 3) {
                    // pick from Range(X) so the result stays in-range
                    CVector cand(n);
                    for (std::size_t c = 0; c < rank_x; ++c) {
                        const cxd w = {nd(rng), nd(rng)};
                        for (std::size_t i = 0; i < n; ++i) cand[i] += w * ex.vectors(i, keep[c]);
                    }
                    y = cand;
                } else {
                    // rank(X)=2: the auxiliary direction must leave Range(X)
                    for (std::size_t i = 0; i < n; ++i) y[i] = {nd(rng), nd(rng)};
                    for (std::size_t c = 0; c < rank_x; ++c) {
                        CVector base(n);
                        for (std::size_t i = 0; i < n; ++i) base[i] = ex.vectors(i, keep[c]);
                        y -= inner(base, y) * base;
                    }
                }
                // orthogonalize against p1, p2 for numerical conditioning
                for (const CVector* p : {&p1, &p2}) {
                    const double pn = p->norm2_sq();
                    if (pn > 0.0) y -= (inner(*p, y) / pn) * (*p);
                }
                const double yn = std::sqrt(y.norm2_sq());
                if (yn > 1e-8) {
                    y *= cxd(1.0 / yn);
                    ok = true;
                }
            }
            if (!ok) continue;
        }

        CMatrix w(n, 3);
        for (std::size_t i = 0; i < n; ++i) {
            w(i, 0) = p1[i];
            w(i, 1) = p2[i];
            w(i, 2) = y[i];
        }
        std::vector<CMatrix> ns;
        ns.reserve(m);
        for (std::size_t i = 0; i < m; ++i) ns.push_back(hermitize(w.adjoint() * req.gs[i] * w));

        const double scale = std::sqrt(p1.norm2_sq() + p2.norm2_sq());
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int start = 0; start < 10; ++start) {
            std::array<cxd, 3> c0;
            if (start == 0) {
                c0 = {cxd(1.0), cxd(1.0), cxd(0.2)};
            } else {
                c0 = {cxd(nd(rng), nd(rng)), cxd(nd(rng), nd(rng)), cxd(0.5 * nd(rng), 0.5 * nd(rng))};
            }
            GnResult gn = gauss_newton_core(ns, targets, c0, scale);
            if (!gn.ok) continue;
            CVector x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = gn.c[0] * w(i, 0) + gn.c[1] * w(i, 1) + gn.c[2] * w(i, 2);
            if (check(x)) return x;
        }
    }
    throw std::runtime_error("decompose: trace matching not achieved within tolerance");
}

}  // namespace secbf
