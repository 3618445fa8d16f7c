#include "mwi/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "mwi/parallel.hpp"

namespace mwi {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

SlitTransmission vdw_slit_transmission(const MaterialGrating& g, const Particle&, double v,
                                       double cutoff_phase, int n_samples) {
    if (v <= 0.0) throw std::domain_error("vdw_slit_transmission: velocity must be positive");
    if (g.C3 < 0.0) throw std::domain_error("vdw_slit_transmission: C3 must be >= 0");
    if (n_samples < 256)
        throw std::domain_error("vdw_slit_transmission: need at least 256 samples per slit");
    double a = g.open_fraction_f * g.period_d;
    SlitTransmission st;
    st.slit_width = a;
    st.xi.resize(n_samples);
    st.t.resize(n_samples);
    st.phase.resize(n_samples);
    double scale = g.C3 * g.thickness_b / (phys.hbar * v);   // eikonal integral of -C3/r^3
    for (int i = 0; i < n_samples; ++i) {
        double xi = (i + 0.5) * a / n_samples;
        st.xi[i] = xi;
        double r1 = xi, r2 = a - xi;
        double phi = scale * (1.0 / (r1 * r1 * r1) + 1.0 / (r2 * r2 * r2));
        st.phase[i] = phi;
        if (std::fabs(phi) > cutoff_phase)
            st.t[i] = 0.0;   // trajectory lost to the wall
        else
            st.t[i] = std::polar(1.0, phi);
    }
    return st;
}

double effective_slit_width(const SlitTransmission& st, double threshold_phase) {
    int n = static_cast<int>(st.xi.size());
    if (n == 0) throw std::domain_error("effective_slit_width: empty transmission");
    double dx = st.slit_width / n;
    auto open = [&](int i) {
        return std::fabs(st.phase[i]) < threshold_phase && std::abs(st.t[i]) > 0.0;
    };
    int c = n / 2;
    if (!open(c)) return 0.0;
    int lo = c, hi = c;
    while (lo > 0 && open(lo - 1)) --lo;
    while (hi < n - 1 && open(hi + 1)) ++hi;
    return (hi - lo + 1) * dx;
}

namespace {

// box filter of total width `width` (rad) on a uniform grid; window clamped at
// the edges and renormalized there
void collimation_blur(std::vector<double>& I, double dtheta, double width) {
    int half = static_cast<int>(std::floor(0.5 * width / dtheta));
    if (half < 1) return;
    int n = static_cast<int>(I.size());
    std::vector<double> out(n);
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + I[i];
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        out[i] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
    I.swap(out);
}

void normalize_peak(FarFieldPattern& p, double dtheta) {
    double total = 0.0, peak = 0.0;
    for (double v : p.intensity) {
        total += v;
        peak = std::max(peak, v);
    }
    p.total_flux = total * dtheta;
    if (peak > 0.0)
        for (double& v : p.intensity) v /= peak;
}

} // namespace

FarFieldPattern farfield_material(const MaterialGrating& g, const Particle& p,
                                  const VelocityDistribution& v_dist, double collimation,
                                  int n_slits, int n_angles, double cutoff_phase) {
    if (n_slits < 1) throw std::domain_error("farfield_material: need at least one slit");
    if (collimation < 0.0) throw std::domain_error("farfield_material: collimation must be >= 0");
    auto nodes = v_dist.quadrature(64);
    if (nodes.empty()) throw std::domain_error("farfield_material: empty velocity window");

    double a = g.open_fraction_f * g.period_d;
    double lambda_bar = de_broglie_wavelength(p.mass, v_dist.mean_v);
    double theta_max = 5.0 * lambda_bar / a;

    FarFieldPattern out;
    out.angles.resize(n_angles);
    out.intensity.assign(n_angles, 0.0);
    double dtheta = 2.0 * theta_max / (n_angles - 1);
    for (int i = 0; i < n_angles; ++i) out.angles[i] = -theta_max + i * dtheta;

    // per velocity node: dressed slit and wavenumber
    struct NodeData {
        double weight, k;
        SlitTransmission slit;
    };
    std::vector<NodeData> nd;
    nd.reserve(nodes.size());
    for (auto [v, w] : nodes) {
        double lam = de_broglie_wavelength(p.mass, v);
        nd.push_back({w, two_pi / lam, vdw_slit_transmission(g, p, v, cutoff_phase, 1024)});
    }

    parallel_for(static_cast<std::size_t>(n_angles), [&](std::size_t ia) {
        double theta = out.angles[ia];
        double acc = 0.0;
        for (const auto& node : nd) {
            const auto& st = node.slit;
            int ns = static_cast<int>(st.xi.size());
            double dxi = st.slit_width / ns;
            // E_slit = sum_j t_j exp(-i k theta xi_j) dxi, incremental rotation
            std::complex<double> rot = std::polar(1.0, -node.k * theta * st.xi[0]);
            std::complex<double> step = std::polar(1.0, -node.k * theta * dxi);
            std::complex<double> eslit{0.0, 0.0};
            for (int j = 0; j < ns; ++j) {
                eslit += st.t[j] * rot;
                rot *= step;
            }
            eslit *= dxi;
            // grating factor over n_slits slits spaced by d
            std::complex<double> gfac{0.0, 0.0};
            std::complex<double> srot{1.0, 0.0};
            std::complex<double> sstep = std::polar(1.0, -node.k * theta * g.period_d);
            for (int s = 0; s < n_slits; ++s) {
                gfac += srot;
                srot *= sstep;
            }
            acc += node.weight * std::norm(eslit * gfac);
        }
        out.intensity[ia] = acc;
    });

    collimation_blur(out.intensity, dtheta, collimation);
    normalize_peak(out, dtheta);
    return out;
}

FarFieldPattern farfield_optical(const OpticalGrating& g, const Particle& p,
                                 const VelocityDistribution& v_dist, double collimation,
                                 int n_angles) {
    if (g.phase_amplitude_phi0 < 0.0)
        throw std::domain_error("farfield_optical: phi0 must be >= 0");
    if (collimation < 0.0) throw std::domain_error("farfield_optical: collimation must be >= 0");
    auto nodes = v_dist.quadrature(64);
    if (nodes.empty()) throw std::domain_error("farfield_optical: empty velocity window");

    double d2 = g.period();
    double half_arg = 0.5 * g.phase_amplitude_phi0;

    // order amplitudes |J_n(phi0/2)|^2, truncated at cumulative mass 1 - 1e-9
    std::vector<double> order_w;   // n = 0, 1, 2, ... (negative orders mirror)
    {
        double j0 = std::cyl_bessel_j(0.0, half_arg);
        order_w.push_back(j0 * j0);
        double mass = j0 * j0;
        for (int n = 1; n < 1024 && mass < 1.0 - 1e-9; ++n) {
            double jn = std::cyl_bessel_j(static_cast<double>(n), half_arg);
            order_w.push_back(jn * jn);
            mass += 2.0 * jn * jn;
        }
    }
    int n_max = static_cast<int>(order_w.size()) - 1;

    double lam_slow = de_broglie_wavelength(p.mass, nodes.front().first);
    for (const auto& [v, w] : nodes)
        lam_slow = std::max(lam_slow, de_broglie_wavelength(p.mass, v));
    double theta_max = (n_max + 1.0) * lam_slow / d2 + collimation;
    if (theta_max <= 0.0) theta_max = std::max(collimation, 1e-6);

    FarFieldPattern out;
    out.angles.resize(n_angles);
    out.intensity.assign(n_angles, 0.0);
    double dtheta = 2.0 * theta_max / (n_angles - 1);
    for (int i = 0; i < n_angles; ++i) out.angles[i] = -theta_max + i * dtheta;

    auto deposit = [&](double center, double weight) {
        if (weight <= 0.0) return;
        if (collimation < dtheta) {   // narrower than one bin: nearest grid point
            int idx = static_cast<int>(std::lround((center + theta_max) / dtheta));
            if (idx >= 0 && idx < n_angles) out.intensity[idx] += weight / dtheta;
            return;
        }
        int lo = static_cast<int>(std::ceil((center - 0.5 * collimation + theta_max) / dtheta));
        int hi = static_cast<int>(std::floor((center + 0.5 * collimation + theta_max) / dtheta));
        lo = std::max(lo, 0);
        hi = std::min(hi, n_angles - 1);
        if (hi < lo) return;
        double share = weight / ((hi - lo + 1) * dtheta);
        for (int i = lo; i <= hi; ++i) out.intensity[i] += share;
    };

    for (const auto& [v, w] : nodes) {
        double lam = de_broglie_wavelength(p.mass, v);
        double spacing = lam / d2;     // 2 hbar k_L of transverse momentum per order
        deposit(0.0, w * order_w[0]);
        for (int n = 1; n <= n_max; ++n) {
            deposit(spacing * n, w * order_w[n]);
            deposit(-spacing * n, w * order_w[n]);
        }
    }

    normalize_peak(out, dtheta);
    return out;
}

FarFieldPattern shift_pattern(const FarFieldPattern& base, double shift_angle) {
    int n = static_cast<int>(base.intensity.size());
    if (n < 2) throw std::domain_error("shift_pattern: pattern too small");
    double dtheta = base.angles[1] - base.angles[0];
    long steps = std::lround(shift_angle / dtheta);
    FarFieldPattern out = base;
    for (int i = 0; i < n; ++i) {
        long src = (i - steps) % n;
        if (src < 0) src += n;
        out.intensity[i] = base.intensity[src];
    }
    return out;
}

std::vector<double> poisson_weights(double n0) {
    if (n0 < 0.0) throw std::domain_error("poisson_weights: n0 must be >= 0");
    std::vector<double> w;
    double term = std::exp(-n0);
    double mass = term;
    w.push_back(term);
    for (int k = 1; mass <= 1.0 - 1e-9 && k < 4096; ++k) {
        term *= n0 / k;
        w.push_back(term);
        mass += term;
    }
    return w;
}

FarFieldPattern absorption_shifted_pattern(const FarFieldPattern& base, double n0,
                                           double period_shift) {
    auto pk = poisson_weights(n0);
    int n = static_cast<int>(base.intensity.size());
    if (n < 2) throw std::domain_error("absorption_shifted_pattern: pattern too small");
    double dtheta = base.angles[1] - base.angles[0];
    long unit = std::lround(period_shift / dtheta);

    // distribution of the net number of +-half-period kicks: Poisson photon
    // count, each photon +1 or -1 with probability 1/2
    std::map<long, double> net;
    for (std::size_t k = 0; k < pk.size(); ++k) {
        double binom = std::pow(0.5, static_cast<double>(k));   // C(k,0)/2^k
        for (std::size_t j = 0; j <= k; ++j) {
            long m = 2 * static_cast<long>(j) - static_cast<long>(k);
            net[m] += pk[k] * binom;
            binom *= static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
    }

    FarFieldPattern out = base;
    out.intensity.assign(n, 0.0);
    for (const auto& [m, weight] : net) {
        long steps = m * unit;
        for (int i = 0; i < n; ++i) {
            long src = (i - steps) % n;
            if (src < 0) src += n;
            out.intensity[i] += weight * base.intensity[src];
        }
    }
    double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
    double total = 0.0;
    for (double v : out.intensity) total += v;
    out.total_flux = total * dtheta;
    if (peak > 0.0)
        for (double& v : out.intensity) v /= peak;
    return out;
}

} // namespace mwi
