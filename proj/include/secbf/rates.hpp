#ifndef SECBF_RATES_HPP
#define SECBF_RATES_HPP

#include <optional>

#include "secbf/channel.hpp"
#include "secbf/linalg.hpp"

// Analytic secrecy rates, information rates, SINRs and powers for both
// schemes. Solver outputs are always re-checked against this module.

namespace secbf {

struct RateReport {
    double secrecy_rate_pu = 0.0;  // bits/s/Hz, clamped at 0
    double info_rate_su = 0.0;     // bits/s/Hz
    std::optional<double> gamma_p;  // linear SINRs, cooperative only
    std::optional<double> gamma_e;
    std::optional<double> gamma_s;
};

struct PowerReport {
    double total = 0.0;
    std::optional<double> pp, pr, ps;  // cooperative split
    std::optional<double> p1, p2;      // underlay split
};

// Underlay: R_p = [log2(1+|hpp^H w1|^2/(s2+|hsp^H w2|^2)) - log2(1+|hps^H w1|^2/s2)]+,
//           R_s = log2(1+|hss^H w2|^2/(s2+|hps^H w1|^2)).
RateReport underlay_rates(const ChannelSet& cs, const CVector& w1, const CVector& w2);

// Cooperative two-slot scheme with AF relay matrix F and MRC at PU-Rx.
// a=1 models the SU-Rx keeping the relayed primary signal as interference,
// a=0 models perfect cancellation of it.
RateReport coop_rates(const ChannelSet& cs, const CVector& w1, const CVector& w2, const CMatrix& F,
                      int a = 1);

PowerReport coop_powers(const ChannelSet& cs, const CVector& w1, const CVector& w2, const CMatrix& F);

PowerReport underlay_power(const CVector& w1, const CVector& w2);

// Vertical stack of H0 and hps^H: the colluding eavesdropper channel, (Ns+1) x Np.
CMatrix eavesdropper_stack(const ChannelSet& cs);

}  // namespace secbf

#endif
