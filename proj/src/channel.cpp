#include "secbf/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace secbf {

void ChannelSet::validate() const {
    const std::size_t np_ = hpp.size();
    const std::size_t ns_ = hsp.size();
    if (np_ < 2 || ns_ < 2) throw std::invalid_argument("ChannelSet: Np and Ns must be >= 2");
    if (sigma2 <= 0.0) throw std::invalid_argument("ChannelSet: sigma2 must be positive");
    if (H0.rows() != ns_ || H0.cols() != np_) throw std::invalid_argument("ChannelSet: H0 must be Ns x Np");
    if (hps.size() != np_) throw std::invalid_argument("ChannelSet: hps must have length Np");
    if (hss.size() != ns_) throw std::invalid_argument("ChannelSet: hss must have length Ns");
}

double path_gain(double d, double c, double n) {
    if (d <= 0.0) throw std::invalid_argument("path_gain: distance must be positive");
    return c * std::pow(d, -n);
}

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// Standard-normal pairs via Box-Muller on mt19937_64 uniforms; avoids any
// dependence on library-specific normal_distribution internals.
class GaussStream {
  public:
    explicit GaussStream(std::uint64_t seed) : eng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }
    cxd next_cn(double var) {
        const double s = std::sqrt(var * 0.5);
        const double re = s * next();
        const double im = s * next();
        return {re, im};
    }

  private:
    double uniform() {
        return (eng_() >> 11) * 0x1.0p-53;  // [0,1) with 53 bits
    }
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

enum LinkTag : std::uint64_t { kH0 = 1, kHpp = 2, kHsp = 3, kHps = 4, kHss = 5 };

}  // namespace

ChannelSet sample_channels(const Topology& topo, std::size_t np, std::size_t ns, double sigma2,
                           std::uint64_t seed) {
    if (np < 2 || ns < 2) throw std::invalid_argument("sample_channels: Np and Ns must be >= 2");
    if (sigma2 <= 0.0) throw std::invalid_argument("sample_channels: sigma2 must be positive");
    const double c = topo.attenuation;
    const double ple = topo.path_loss_exp;
    if (c <= 0.0 || ple < 0.0) throw std::invalid_argument("sample_channels: invalid topology constants");

    const double a_h0 = path_gain(distance(topo.pu_tx, topo.su_tx), c, ple);
    const double a_pp = path_gain(distance(topo.pu_tx, topo.pu_rx), c, ple);
    const double a_sp = path_gain(distance(topo.su_tx, topo.pu_rx), c, ple);
    const double a_ps = path_gain(distance(topo.pu_tx, topo.su_rx), c, ple);
    const double a_ss = path_gain(distance(topo.su_tx, topo.su_rx), c, ple);

    ChannelSet cs;
    cs.sigma2 = sigma2;
    cs.H0 = CMatrix(ns, np);
    {
        GaussStream g(mix_seed(seed, kH0));
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < np; ++j) cs.H0(i, j) = g.next_cn(a_h0);
    }
    auto fill = [&](CVector& v, std::size_t len, double var, std::uint64_t tag) {
        v = CVector(len);
        GaussStream g(mix_seed(seed, tag));
        for (std::size_t i = 0; i < len; ++i) v[i] = g.next_cn(var);
    };
    fill(cs.hpp, np, a_pp, kHpp);
    fill(cs.hsp, ns, a_sp, kHsp);
    fill(cs.hps, np, a_ps, kHps);
    fill(cs.hss, ns, a_ss, kHss);
    return cs;
}

namespace {

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_block(std::ostream& os, const std::string& name, const CMatrix& m) {
    os << name << " " << m.rows() << " " << m.cols() << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << " ";
            os << fmt_full(m(i, j).real()) << " " << fmt_full(m(i, j).imag());
        }
        os << "\n";
    }
}

void write_block(std::ostream& os, const std::string& name, const CVector& v) {
    os << name << " " << v.size() << "\n";
    for (std::size_t i = 0; i < v.size(); ++i)
        os << fmt_full(v[i].real()) << " " << fmt_full(v[i].imag()) << "\n";
}

}  // namespace

void save_channels(const ChannelSet& cs, const std::string& path) {
    cs.validate();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_channels: cannot open " + path);
    os << "# channel set v1\n";
    os << "np " << cs.np() << "\n";
    os << "ns " << cs.ns() << "\n";
    os << "sigma2 " << fmt_full(cs.sigma2) << "\n";
    write_block(os, "H0", cs.H0);
    write_block(os, "hpp", cs.hpp);
    write_block(os, "hsp", cs.hsp);
    write_block(os, "hps", cs.hps);
    write_block(os, "hss", cs.hss);
    if (!os) throw std::runtime_error("save_channels: write failed for " + path);
}

namespace {

std::string next_content_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        return line;
    }
    throw std::runtime_error("load_channels: unexpected end of file");
}

CMatrix read_matrix(std::istream& is, const std::string& name) {
    std::istringstream hdr(next_content_line(is));
    std::string label;
    std::size_t rows = 0, cols = 0;
    if (!(hdr >> label >> rows >> cols) || label != name || rows == 0 || cols == 0)
        throw std::runtime_error("load_channels: malformed header for block " + name);
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        std::istringstream row(next_content_line(is));
        for (std::size_t j = 0; j < cols; ++j) {
            double re = 0.0, im = 0.0;
            if (!(row >> re >> im)) throw std::runtime_error("load_channels: short row in block " + name);
            m(i, j) = {re, im};
        }
        double extra;
        if (row >> extra) throw std::runtime_error("load_channels: extra entries in block " + name);
    }
    return m;
}

CVector read_vector(std::istream& is, const std::string& name) {
    std::istringstream hdr(next_content_line(is));
    std::string label;
    std::size_t len = 0;
    if (!(hdr >> label >> len) || label != name || len == 0)
        throw std::runtime_error("load_channels: malformed header for block " + name);
    CVector v(len);
    for (std::size_t i = 0; i < len; ++i) {
        std::istringstream row(next_content_line(is));
        double re = 0.0, im = 0.0;
        if (!(row >> re >> im)) throw std::runtime_error("load_channels: short row in block " + name);
        v[i] = {re, im};
    }
    return v;
}

}  // namespace

ChannelSet load_channels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_channels: cannot open " + path);
    ChannelSet cs;
    std::size_t np = 0, ns = 0;
    {
        std::istringstream l(next_content_line(is));
        std::string k;
        if (!(l >> k >> np) || k != "np") throw std::runtime_error("load_channels: expected 'np'");
    }
    {
        std::istringstream l(next_content_line(is));
        std::string k;
        if (!(l >> k >> ns) || k != "ns") throw std::runtime_error("load_channels: expected 'ns'");
    }
    {
        std::istringstream l(next_content_line(is));
        std::string k;
        if (!(l >> k >> cs.sigma2) || k != "sigma2") throw std::runtime_error("load_channels: expected 'sigma2'");
    }
    cs.H0 = read_matrix(is, "H0");
    cs.hpp = read_vector(is, "hpp");
    cs.hsp = read_vector(is, "hsp");
    cs.hps = read_vector(is, "hps");
    cs.hss = read_vector(is, "hss");
    if (cs.hpp.size() != np || cs.hsp.size() != ns)
        throw std::runtime_error("load_channels: header/block dimension mismatch");
    cs.validate();
    return cs;
}

}  // namespace secbf
