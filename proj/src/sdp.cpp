#include "secbf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "realsym.hpp"

// Homogeneous self-dual embedding with Nesterov-Todd scaling and a
// Mehrotra predictor-corrector step. Inequalities get nonnegative slack
// variables, modelled as 1x1 blocks of the symmetric cone. Defaults:
// iteration cap 200, step damping 0.98, centering sigma = (mu_aff/mu)^3.

namespace secbf {

using detail::RMat;
using detail::SymEig;

void SdpProblem::validate() const {
    if (n < 1) throw std::invalid_argument("SdpProblem: n must be >= 1");
    if (objective.rows() != n || objective.cols() != n)
        throw std::invalid_argument("SdpProblem: objective must be n x n");
    if (!is_hermitian(objective)) throw std::invalid_argument("SdpProblem: objective not Hermitian");
    if (constraints.empty()) throw std::invalid_argument("SdpProblem: constraint list is empty");
    for (const SdpConstraint& c : constraints) {
        if (c.a.rows() != n || c.a.cols() != n)
            throw std::invalid_argument("SdpProblem: constraint matrix must be n x n");
        if (!is_hermitian(c.a)) throw std::invalid_argument("SdpProblem: constraint matrix not Hermitian");
        if (!std::isfinite(c.b)) throw std::invalid_argument("SdpProblem: constraint rhs not finite");
    }
}

CMatrix embed_hermitian(const CMatrix& m) {
    const std::size_t n = m.rows();
    CMatrix e(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double re = m(i, j).real();
            const double im = m(i, j).imag();
            e(i, j) = re;
            e(i + n, j + n) = re;
            e(i, j + n) = -im;
            e(i + n, j) = im;
        }
    return e;
}

namespace {

struct BlockVec {
    std::vector<RMat> blk;

    double inner(const BlockVec& o) const {
        double s = 0.0;
        for (std::size_t k = 0; k < blk.size(); ++k) s += blk[k].inner(o.blk[k]);
        return s;
    }
    void axpy(double a, const BlockVec& o) {
        for (std::size_t k = 0; k < blk.size(); ++k) blk[k].axpy(a, o.blk[k]);
    }
    void scale(double s) {
        for (RMat& m : blk) m.scale(s);
    }
    void set_zero() {
        for (RMat& m : blk)
            for (double& v : m.a) v = 0.0;
    }
    void set_identity() {
        for (RMat& m : blk) m.set_identity();
    }
    double max_abs() const {
        double m = 0.0;
        for (const RMat& b : blk) m = std::max(m, b.max_abs());
        return m;
    }
    void symmetrize() {
        for (RMat& m : blk) m.symmetrize();
    }
};

BlockVec make_blockvec(const std::vector<int>& sizes) {
    BlockVec v;
    v.blk.reserve(sizes.size());
    for (int s : sizes) v.blk.emplace_back(s);
    return v;
}

RMat embed_to_rmat(const CMatrix& m, double factor) {
    const int n = static_cast<int>(m.rows());
    RMat r(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double re = factor * m(i, j).real();
            const double im = factor * m(i, j).imag();
            r.at(i, j) = re;
            r.at(i + n, j + n) = re;
            r.at(i, j + n) = -im;
            r.at(i + n, j) = im;
        }
    return r;
}

struct ConicData {
    int m = 0;
    std::vector<int> sizes;
    BlockVec c;
    std::vector<BlockVec> A;
    std::vector<double> b;
    double nu = 0.0;
};

struct Scaling {
    std::vector<RMat> R, Rinv;
    std::vector<std::vector<double>> lam;
    bool ok = false;
};

// NT scaling point per block via two symmetric eigendecompositions:
// R = S^(-1/2) Q_T Sig^(1/4), Rinv = Sig^(-1/4) Q_T^T S^(1/2), lam = sqrt(Sig)
// where T = S^(1/2) X S^(1/2) = Q_T Sig Q_T^T.
Scaling nt_scaling(const BlockVec& x, const BlockVec& s) {
    Scaling sc;
    const std::size_t nb = x.blk.size();
    sc.R.resize(nb);
    sc.Rinv.resize(nb);
    sc.lam.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        const int n = x.blk[k].n;
        SymEig es = detail::sym_eig(s.blk[k]);
        if (es.values.front() <= 0.0) return sc;
        RMat s_half(n), s_mhalf(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc_h = 0.0, acc_m = 0.0;
                for (int t = 0; t < n; ++t) {
                    const double q = es.vectors.at(i, t) * es.vectors.at(j, t);
                    const double sq = std::sqrt(es.values[t]);
                    acc_h += q * sq;
                    acc_m += q / sq;
                }
                s_half.at(i, j) = acc_h;
                s_mhalf.at(i, j) = acc_m;
            }
        RMat tmp(n), tmat(n);
        detail::mul(s_half, x.blk[k], tmp);
        detail::mul(tmp, s_half, tmat);
        tmat.symmetrize();
        SymEig et = detail::sym_eig(tmat);
        if (et.values.front() <= 0.0) return sc;

        RMat& r = sc.R[k];
        RMat& rinv = sc.Rinv[k];
        r = RMat(n);
        rinv = RMat(n);
        sc.lam[k].resize(n);
        for (int t = 0; t < n; ++t) sc.lam[k][t] = std::sqrt(et.values[t]);
        // R = S^(-1/2) Qt diag(sig^(1/4))
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < n; ++t) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += s_mhalf.at(i, j) * et.vectors.at(j, t);
                r.at(i, t) = acc * std::sqrt(sc.lam[k][t]);
            }
        // Rinv = diag(sig^(-1/4)) Qt^T S^(1/2)
        for (int t = 0; t < n; ++t) {
            const double d = 1.0 / std::sqrt(sc.lam[k][t]);
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) acc += et.vectors.at(i, t) * s_half.at(i, j);
                rinv.at(t, j) = acc * d;
            }
        }
    }
    sc.ok = true;
    return sc;
}

// sup { alpha : lam + alpha * dl (in the scaled space, given as a dense
// symmetric matrix) stays PSD }, where lam is the diagonal NT spectrum.
double psd_step_bound(const std::vector<double>& lam, const RMat& dl) {
    const int n = dl.n;
    RMat b(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b.at(i, j) = dl.at(i, j) / std::sqrt(lam[i] * lam[j]);
    b.symmetrize();
    SymEig e = detail::sym_eig(b);
    const double lmin = e.values.front();
    if (lmin >= -1e-300) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

struct Direction {
    BlockVec dx, ds;
    std::vector<double> dy;
    double dtau = 0.0, dkappa = 0.0;
};

struct Workspace {
    std::vector<BlockVec> G;  // R^T A_i R
    BlockVec Gc;              // R^T c R
    RMat schur, schur_chol;
    std::vector<double> aw_c;  // <A_i, W c W>
    double cwc = 0.0;          // <c, W c W>
    std::vector<double> u2;
};

void scaled_congruence(const RMat& r, const RMat& u, RMat& out, RMat& tmp) {
    detail::mul_tn(r, u, tmp);  // R^T U
    detail::mul(tmp, r, out);   // R^T U R
}

void congruence_back(const RMat& r, const RMat& u, RMat& out, RMat& tmp) {
    detail::mul(r, u, tmp);      // R U
    detail::mul_nt(tmp, r, out); // R U R^T
}

}  // namespace

SdpSolution solve(const SdpProblem& prob, double tol) {
    prob.validate();
    if (!(tol >= 1e-12 && tol <= 1e-4)) throw std::invalid_argument("sdp::solve: tol out of [1e-12, 1e-4]");

    const int nc = static_cast<int>(prob.n);
    const int m = static_cast<int>(prob.constraints.size());

    // row scaling keeps internal data O(1)
    std::vector<double> row_scale(m, 1.0);
    for (int i = 0; i < m; ++i) {
        const SdpConstraint& con = prob.constraints[i];
        row_scale[i] = 1.0 / std::max({1.0, con.a.max_abs(), std::abs(con.b)});
    }
    const double obj_scale = 1.0 / std::max(1.0, prob.objective.max_abs());

    ConicData cd;
    cd.m = m;
    cd.sizes.push_back(2 * nc);
    int n_slack = 0;
    for (const SdpConstraint& con : prob.constraints)
        if (con.sense != Sense::EQ) ++n_slack;
    for (int i = 0; i < n_slack; ++i) cd.sizes.push_back(1);
    cd.nu = 0.0;
    for (int s : cd.sizes) cd.nu += s;

    cd.c = make_blockvec(cd.sizes);
    cd.c.blk[0] = embed_to_rmat(prob.objective, 0.5 * obj_scale);
    cd.b.resize(m);
    cd.A.reserve(m);
    {
        int slack_idx = 0;
        for (int i = 0; i < m; ++i) {
            const SdpConstraint& con = prob.constraints[i];
            BlockVec ai = make_blockvec(cd.sizes);
            ai.blk[0] = embed_to_rmat(con.a, 0.5 * row_scale[i]);
            if (con.sense == Sense::GE) ai.blk[1 + slack_idx++].a[0] = -1.0;
            else if (con.sense == Sense::LE) ai.blk[1 + slack_idx++].a[0] = 1.0;
            cd.A.push_back(std::move(ai));
            cd.b[i] = con.b * row_scale[i];
        }
    }

    const double bmax = [&] {
        double v = 0.0;
        for (double x : cd.b) v = std::max(v, std::abs(x));
        return v;
    }();
    const double cmax = cd.c.max_abs();

    BlockVec x = make_blockvec(cd.sizes);
    BlockVec s = make_blockvec(cd.sizes);
    x.set_identity();
    s.set_identity();
    std::vector<double> y(m, 0.0);
    double tau = 1.0, kappa = 1.0;

    SdpSolution sol;
    sol.status = SdpStatus::NumericalFailure;

    auto a_apply = [&](const BlockVec& v, std::vector<double>& out) {
        out.resize(m);
        for (int i = 0; i < m; ++i) out[i] = cd.A[i].inner(v);
    };
    auto a_adjoint = [&](const std::vector<double>& yy, BlockVec& out) {
        out.set_zero();
        for (int i = 0; i < m; ++i)
            if (yy[i] != 0.0) out.axpy(yy[i], cd.A[i]);
    };

    const int max_iter = 200;
    Workspace ws;
    ws.G.resize(m);
    std::vector<double> ax, res_p(m);
    BlockVec res_d = make_blockvec(cd.sizes);
    BlockVec asty = make_blockvec(cd.sizes);

    auto extract_optimal = [&]() {
        SdpSolution out;
        out.status = SdpStatus::Optimal;
        CMatrix X(prob.n, prob.n);
        const RMat& bx = x.blk[0];
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j) {
                const double re = 0.5 * (bx.at(i, j) + bx.at(i + nc, j + nc)) / tau;
                const double im = 0.5 * (bx.at(i + nc, j) - bx.at(i, j + nc)) / tau;
                X(i, j) = {re, im};
            }
        X = hermitize(X);
        out.X = X;
        out.objective_value = trace_prod(prob.objective, X);
        double dual = 0.0;
        for (int i = 0; i < m; ++i) dual += cd.b[i] * y[i];
        out.dual_objective_value = dual / (tau * obj_scale);
        double viol = 0.0;
        for (int i = 0; i < m; ++i) {
            const SdpConstraint& con = prob.constraints[i];
            const double val = trace_prod(con.a, X);
            double v = 0.0;
            if (con.sense == Sense::GE) v = std::max(0.0, con.b - val);
            else if (con.sense == Sense::LE) v = std::max(0.0, val - con.b);
            else v = std::abs(val - con.b);
            viol = std::max(viol, v / (1.0 + std::abs(con.b) + con.a.max_abs()));
        }
        out.max_constraint_violation = viol;
        const double gap_abs = (x.inner(s) / (tau * tau)) / obj_scale;
        out.duality_gap_estimate = gap_abs / (1.0 + std::abs(out.objective_value));
        return out;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        sol.iterations = iter;

        a_apply(x, ax);
        for (int i = 0; i < m; ++i) res_p[i] = ax[i] - cd.b[i] * tau;
        a_adjoint(y, asty);
        res_d = cd.c;
        res_d.scale(tau);
        res_d.axpy(-1.0, asty);
        res_d.axpy(-1.0, s);
        const double cx = cd.c.inner(x);
        double by = 0.0;
        for (int i = 0; i < m; ++i) by += cd.b[i] * y[i];
        const double res_g = cx - by + kappa;
        const double gap = x.inner(s) + tau * kappa;
        const double mu = gap / (cd.nu + 1.0);

        double pres = 0.0;
        for (double v : res_p) pres = std::max(pres, std::abs(v));
        pres /= tau * (1.0 + bmax);
        const double dres = res_d.max_abs() / (tau * (1.0 + cmax));
        const double obj_p = cx / tau;
        const double relgap = (x.inner(s) / (tau * tau)) / (1.0 + std::abs(obj_p));

        if (pres <= tol && dres <= tol && relgap <= tol) {
            SdpSolution out = extract_optimal();
            out.iterations = iter;
            return out;
        }

        // infeasibility / unboundedness certificates from the HSD ray
        if (by > 0.0) {
            BlockVec cert = make_blockvec(cd.sizes);
            a_adjoint(y, cert);
            cert.axpy(1.0, s);
            if (cert.max_abs() / by <= 1e-8) {
                sol.status = SdpStatus::Infeasible;
                sol.iterations = iter;
                return sol;
            }
        }
        if (cx < 0.0) {
            double anorm = 0.0;
            for (double v : ax) anorm = std::max(anorm, std::abs(v));
            if (anorm / (-cx) <= 1e-8) {
                sol.status = SdpStatus::Unbounded;
                sol.iterations = iter;
                return sol;
            }
        }

        Scaling sc = nt_scaling(x, s);
        if (!sc.ok) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }
        const std::size_t nb = cd.sizes.size();
        RMat tmp, tmp2;

        for (int i = 0; i < m; ++i) {
            ws.G[i].blk.resize(nb);
            for (std::size_t k = 0; k < nb; ++k)
                scaled_congruence(sc.R[k], cd.A[i].blk[k], ws.G[i].blk[k], tmp);
        }
        ws.Gc.blk.resize(nb);
        for (std::size_t k = 0; k < nb; ++k) scaled_congruence(sc.R[k], cd.c.blk[k], ws.Gc.blk[k], tmp);

        ws.schur = RMat(m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                const double v = ws.G[i].inner(ws.G[j]);
                ws.schur.at(i, j) = v;
                ws.schur.at(j, i) = v;
            }
        ws.aw_c.resize(m);
        for (int i = 0; i < m; ++i) ws.aw_c[i] = ws.G[i].inner(ws.Gc);
        ws.cwc = ws.Gc.inner(ws.Gc);

        bool factored = false;
        double jitter = 0.0;
        for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
            RMat shifted = ws.schur;
            if (jitter > 0.0)
                for (int i = 0; i < m; ++i) shifted.at(i, i) += jitter;
            factored = detail::cholesky(shifted, ws.schur_chol);
            jitter = (jitter == 0.0) ? 1e-14 * (1.0 + ws.schur.max_abs()) : jitter * 100.0;
        }
        if (!factored) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }

        std::vector<double> h(m);
        for (int i = 0; i < m; ++i) h[i] = ws.aw_c[i] + cd.b[i];
        detail::chol_solve(ws.schur_chol, h, ws.u2);

        // rhs_lambda per block (scaled space), rhs for tau*kappa, residual factor eta
        auto solve_direction = [&](const std::vector<RMat>& rhs_lambda, double rhs_tk, double eta,
                                   Direction& dir) {
            // D = -eta * W(res_d) + R rhs_lambda R^T
            BlockVec D = make_blockvec(cd.sizes);
            for (std::size_t k = 0; k < nb; ++k) {
                scaled_congruence(sc.R[k], res_d.blk[k], tmp2, tmp);  // R^T res_d R
                tmp2.scale(-eta);
                tmp2.axpy(1.0, rhs_lambda[k]);
                congruence_back(sc.R[k], tmp2, D.blk[k], tmp);
            }
            std::vector<double> r1(m);
            for (int i = 0; i < m; ++i) r1[i] = -eta * res_p[i] - cd.A[i].inner(D);
            std::vector<double> u1;
            detail::chol_solve(ws.schur_chol, r1, u1);

            const double cD = cd.c.inner(D);
            const double rhs2 = -eta * res_g - rhs_tk / tau - cD;
            double g_u1 = 0.0, g_u2 = 0.0;
            for (int i = 0; i < m; ++i) {
                const double gi = ws.aw_c[i] - cd.b[i];
                g_u1 += gi * u1[i];
                g_u2 += gi * ws.u2[i];
            }
            const double denom = g_u2 - ws.cwc - kappa / tau;
            if (std::abs(denom) < 1e-300) return false;
            dir.dtau = (rhs2 - g_u1) / denom;
            dir.dy.resize(m);
            for (int i = 0; i < m; ++i) dir.dy[i] = u1[i] + ws.u2[i] * dir.dtau;

            // dX = W(A*(dy) - c dtau) + D ; dS = eta res_d - A*(dy) + c dtau
            BlockVec ady = make_blockvec(cd.sizes);
            a_adjoint(dir.dy, ady);
            ady.axpy(-dir.dtau, cd.c);
            dir.dx = D;
            RMat scratch;
            for (std::size_t k = 0; k < nb; ++k) {
                scaled_congruence(sc.R[k], ady.blk[k], tmp2, tmp);
                congruence_back(sc.R[k], tmp2, scratch, tmp);
                dir.dx.blk[k].axpy(1.0, scratch);
            }
            dir.ds = res_d;
            dir.ds.scale(eta);
            dir.ds.axpy(-1.0, ady);  // ady already includes -c dtau with the right sign
            dir.dkappa = (rhs_tk - kappa * dir.dtau) / tau;
            return true;
        };

        // predictor
        std::vector<RMat> rhs_aff(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            rhs_aff[k] = RMat(cd.sizes[k]);
            for (int i = 0; i < cd.sizes[k]; ++i) rhs_aff[k].at(i, i) = -sc.lam[k][i];
        }
        Direction aff;
        if (!solve_direction(rhs_aff, -tau * kappa, 1.0, aff)) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }

        // scaled affine directions, step-to-boundary
        std::vector<RMat> dlx_a(nb), dls_a(nb);
        double alpha_aff = 1.0;
        for (std::size_t k = 0; k < nb; ++k) {
            // dlx = Rinv dX Rinv^T
            detail::mul(sc.Rinv[k], aff.dx.blk[k], tmp);
            detail::mul_nt(tmp, sc.Rinv[k], dlx_a[k]);
            // dls = R^T dS R
            scaled_congruence(sc.R[k], aff.ds.blk[k], dls_a[k], tmp);
            alpha_aff = std::min(alpha_aff, psd_step_bound(sc.lam[k], dlx_a[k]));
            alpha_aff = std::min(alpha_aff, psd_step_bound(sc.lam[k], dls_a[k]));
        }
        if (aff.dtau < 0.0) alpha_aff = std::min(alpha_aff, -tau / aff.dtau);
        if (aff.dkappa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / aff.dkappa);
        alpha_aff = std::min(alpha_aff, 1.0);

        const double xs_cross = aff.dx.inner(s) + x.inner(aff.ds);
        const double dd = aff.dx.inner(aff.ds);
        const double gap_aff = gap + alpha_aff * (xs_cross + aff.dtau * kappa + tau * aff.dkappa) +
                               alpha_aff * alpha_aff * (dd + aff.dtau * aff.dkappa);
        double sigma = std::pow(std::max(0.0, gap_aff / gap), 3);
        sigma = std::clamp(sigma, 1e-4, 0.9999);

        // corrector
        std::vector<RMat> rhs_cor(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            const int n = cd.sizes[k];
            rhs_cor[k] = RMat(n);
            RMat prod(n);
            detail::mul(dlx_a[k], dls_a[k], prod);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double corr = 0.5 * (prod.at(i, j) + prod.at(j, i));
                    double v = -corr;
                    if (i == j) v += sigma * mu - sc.lam[k][i] * sc.lam[k][i];
                    rhs_cor[k].at(i, j) = 2.0 * v / (sc.lam[k][i] + sc.lam[k][j]);
                }
        }
        const double rhs_tk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        Direction dir;
        if (!solve_direction(rhs_cor, rhs_tk, 1.0 - sigma, dir)) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }

        double alpha = 1.0 / 0.98;  // so damping yields at most 1 pre-cap
        for (std::size_t k = 0; k < nb; ++k) {
            RMat dlx, dls;
            detail::mul(sc.Rinv[k], dir.dx.blk[k], tmp);
            detail::mul_nt(tmp, sc.Rinv[k], dlx);
            scaled_congruence(sc.R[k], dir.ds.blk[k], dls, tmp);
            alpha = std::min(alpha, psd_step_bound(sc.lam[k], dlx));
            alpha = std::min(alpha, psd_step_bound(sc.lam[k], dls));
        }
        if (dir.dtau < 0.0) alpha = std::min(alpha, -tau / dir.dtau);
        if (dir.dkappa < 0.0) alpha = std::min(alpha, -kappa / dir.dkappa);
        alpha = std::min(1.0, 0.98 * alpha);
        if (alpha < 1e-10) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }

        x.axpy(alpha, dir.dx);
        s.axpy(alpha, dir.ds);
        for (int i = 0; i < m; ++i) y[i] += alpha * dir.dy[i];
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        x.symmetrize();
        s.symmetrize();
        if (tau < 1e-300 || !std::isfinite(tau)) {
            sol.status = SdpStatus::NumericalFailure;
            return sol;
        }
    }

    sol.status = SdpStatus::NumericalFailure;
    sol.iterations = max_iter;
    return sol;
}

}  // namespace secbf
