#ifndef SECBF_CHANNEL_HPP
#define SECBF_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <string>

#include "secbf/linalg.hpp"

// Network realizations: topology, path loss, Rayleigh fading, and a
// diff-able text serialization with one committed golden file.

namespace secbf {

struct Topology {
    std::array<double, 2> pu_tx{-0.5, 0.0};
    std::array<double, 2> pu_rx{0.5, 0.0};
    std::array<double, 2> su_tx{0.0, 0.0};
    std::array<double, 2> su_rx{0.0, 0.5};
    double attenuation = 1.0;     // c
    double path_loss_exp = 3.0;   // n
};

struct ChannelSet {
    CMatrix H0;    // Ns x Np, PU-Tx -> SU-Tx
    CVector hpp;   // Np, PU-Tx -> PU-Rx
    CVector hsp;   // Ns, SU-Tx -> PU-Rx
    CVector hps;   // Np, PU-Tx -> SU-Rx
    CVector hss;   // Ns, SU-Tx -> SU-Rx
    double sigma2 = 1.0;

    std::size_t np() const { return hpp.size(); }
    std::size_t ns() const { return hsp.size(); }
    void validate() const;  // throws on inconsistent dimensions / Np,Ns < 2 / sigma2 <= 0
};

// c * d^(-n); throws if d <= 0.
double path_gain(double d, double c, double n);

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b);

// Entries of each link are i.i.d. CN(0, alpha_link) where alpha_link is the
// path gain of the link; per-link generator streams are derived from the
// seed, so draws are deterministic and links are mutually independent.
ChannelSet sample_channels(const Topology& topo, std::size_t np, std::size_t ns, double sigma2,
                           std::uint64_t seed);

void save_channels(const ChannelSet& cs, const std::string& path);
ChannelSet load_channels(const std::string& path);

// SplitMix64 step, used to derive per-link and per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace secbf

#endif
