#include "secbf/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace secbf {

namespace {

double log2p1(double x) { return std::log2(1.0 + x); }

double abs2(cxd z) { return std::norm(z); }

}  // namespace

RateReport underlay_rates(const ChannelSet& cs, const CVector& w1, const CVector& w2) {
    if (w1.size() != cs.np() || w2.size() != cs.ns())
        throw std::invalid_argument("underlay_rates: beamformer dimension mismatch");
    const double s2 = cs.sigma2;
    const double main_term = abs2(inner(cs.hpp, w1));
    const double cross_pu = abs2(inner(cs.hsp, w2));
    const double eav = abs2(inner(cs.hps, w1));
    const double su_sig = abs2(inner(cs.hss, w2));

    RateReport r;
    const double rate_main = log2p1(main_term / (s2 + cross_pu));
    const double rate_eav = log2p1(eav / s2);
    r.secrecy_rate_pu = std::max(0.0, rate_main - rate_eav);
    r.info_rate_su = log2p1(su_sig / (s2 + eav));
    return r;
}

RateReport coop_rates(const ChannelSet& cs, const CVector& w1, const CVector& w2, const CMatrix& F,
                      int a) {
    if (w1.size() != cs.np() || w2.size() != cs.ns())
        throw std::invalid_argument("coop_rates: beamformer dimension mismatch");
    if (F.rows() != cs.ns() || F.cols() != cs.ns())
        throw std::invalid_argument("coop_rates: F must be Ns x Ns");
    if (a != 0 && a != 1) throw std::invalid_argument("coop_rates: a must be 0 or 1");
    const double s2 = cs.sigma2;

    const CMatrix He = eavesdropper_stack(cs);
    const CVector He_w1 = He * w1;
    const double gamma_e = He_w1.norm2_sq() / s2;

    const CVector relayed = F * (cs.H0 * w1);       // F H0 w1
    const CVector fh_sp = F.adjoint() * cs.hsp;     // F^H hsp
    const CVector fh_ss = F.adjoint() * cs.hss;     // F^H hss

    const double direct = abs2(inner(cs.hpp, w1)) / s2;
    const double relay_num = abs2(inner(cs.hsp, relayed));
    const double relay_den = abs2(inner(cs.hsp, w2)) + s2 * (1.0 + fh_sp.norm2_sq());
    const double gamma_p = direct + relay_num / relay_den;

    const double su_num = abs2(inner(cs.hss, w2));
    const double su_den = s2 * (1.0 + fh_ss.norm2_sq()) + a * abs2(inner(cs.hss, relayed));
    const double gamma_s = su_num / su_den;

    RateReport r;
    r.gamma_p = gamma_p;
    r.gamma_e = gamma_e;
    r.gamma_s = gamma_s;
    r.secrecy_rate_pu = std::max(0.0, 0.5 * (log2p1(gamma_p) - log2p1(gamma_e)));
    r.info_rate_su = 0.5 * log2p1(gamma_s);
    return r;
}

PowerReport coop_powers(const ChannelSet& cs, const CVector& w1, const CVector& w2, const CMatrix& F) {
    if (w1.size() != cs.np() || w2.size() != cs.ns())
        throw std::invalid_argument("coop_powers: beamformer dimension mismatch");
    if (F.rows() != cs.ns() || F.cols() != cs.ns())
        throw std::invalid_argument("coop_powers: F must be Ns x Ns");
    const CVector relayed = F * (cs.H0 * w1);
    double f_fro2 = 0.0;
    for (std::size_t i = 0; i < F.rows(); ++i)
        for (std::size_t j = 0; j < F.cols(); ++j) f_fro2 += std::norm(F(i, j));

    PowerReport p;
    p.pp = 0.5 * w1.norm2_sq();
    p.pr = 0.5 * (relayed.norm2_sq() + cs.sigma2 * f_fro2);
    p.ps = 0.5 * w2.norm2_sq();
    p.total = *p.pp + *p.pr + *p.ps;
    return p;
}

PowerReport underlay_power(const CVector& w1, const CVector& w2) {
    PowerReport p;
    p.p1 = w1.norm2_sq();
    p.p2 = w2.norm2_sq();
    p.total = *p.p1 + *p.p2;
    return p;
}

CMatrix eavesdropper_stack(const ChannelSet& cs) {
    const std::size_t ns = cs.ns(), np = cs.np();
    CMatrix he(ns + 1, np);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < np; ++j) he(i, j) = cs.H0(i, j);
    for (std::size_t j = 0; j < np; ++j) he(ns, j) = std::conj(cs.hps[j]);
    return he;
}

}  // namespace secbf
