#include "mwi/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mwi/parallel.hpp"
#include "mwi/quadrature.hpp"

namespace mwi {

// --------------------------------------------------------------------------
// worker count shared by all parallel loops
// --------------------------------------------------------------------------

namespace {
std::atomic<int> g_threads{0};
}

int thread_count() {
    int n = g_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

// --------------------------------------------------------------------------
// EmissionSpectrum
// --------------------------------------------------------------------------

double EmissionSpectrum::sigma_abs(double lambda) const {
    if (lambda <= 0.0) throw std::domain_error("sigma_abs: wavelength must be positive");
    if (model == EmissionModel::powerlaw_with_gap) {
        double photon_energy = phys.h * phys.c / lambda;
        if (gap_energy > 0.0 && photon_energy < gap_energy) return 0.0;
        double r = lambda_ref / lambda;
        return sigma0 * r * r;
    }
    if (sigma_abs_table.empty())
        throw std::domain_error("sigma_abs: empty cross-section table");
    if (lambda < sigma_abs_table.front().first || lambda > sigma_abs_table.back().first)
        throw std::domain_error("sigma_abs: wavelength outside table range");
    auto it = std::lower_bound(sigma_abs_table.begin(), sigma_abs_table.end(),
                               std::make_pair(lambda, 0.0));
    if (it == sigma_abs_table.begin()) return it->second;
    auto lo = std::prev(it);
    double t = (lambda - lo->first) / (it->first - lo->first);
    return lo->second + t * (it->second - lo->second);
}

// --------------------------------------------------------------------------
// VelocityDistribution
// --------------------------------------------------------------------------

bool VelocityDistribution::monochromatic() const {
    if (shape == VelocityShape::gaussian && sigma_v == 0.0) return true;
    return v_max <= v_min;
}

namespace {

// antiderivative of v^3 exp(-v^2/vt^2)
double effusive_cdf_part(double v, double vt2) {
    return -0.5 * vt2 * std::exp(-v * v / vt2) * (v * v + vt2);
}

double gaussian_window_mass(double mu, double sigma, double lo, double hi) {
    double s = sigma * std::numbers::sqrt2;
    return sigma * std::sqrt(std::numbers::pi / 2.0) *
           (std::erf((hi - mu) / s) - std::erf((lo - mu) / s));
}

} // namespace

double VelocityDistribution::pdf(double v) const {
    if (monochromatic())
        throw std::domain_error("pdf: distribution is monochromatic");
    if (v < v_min || v > v_max) return 0.0;
    if (shape == VelocityShape::gaussian) {
        double z = gaussian_window_mass(mean_v, sigma_v, v_min, v_max);
        double u = (v - mean_v) / sigma_v;
        return std::exp(-0.5 * u * u) / z;
    }
    double vt = mean_v * std::sqrt(2.0 / 3.0);   // mean_v = most probable flux velocity
    double vt2 = vt * vt;
    double z = effusive_cdf_part(v_max, vt2) - effusive_cdf_part(v_min, vt2);
    return v * v * v * std::exp(-v * v / vt2) / z;
}

std::vector<std::pair<double, double>> VelocityDistribution::quadrature(int n) const {
    if (monochromatic()) return {{mean_v, 1.0}};
    const auto& [x, w] = gauss_legendre(n);
    double mid = 0.5 * (v_min + v_max), half = 0.5 * (v_max - v_min);
    std::vector<std::pair<double, double>> nodes(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = mid + half * x[i];
        double wt = w[i] * half * pdf(v);
        nodes[i] = {v, wt};
        total += wt;
    }
    for (auto& nd : nodes) nd.second /= total;   // exact unit mass on the window
    return nodes;
}

VelocityDistribution make_gaussian_beam(double mean_v, double sigma_v, double v_min,
                                        double v_max) {
    if (mean_v <= 0.0) throw std::domain_error("make_gaussian_beam: mean_v must be positive");
    if (sigma_v < 0.0) throw std::domain_error("make_gaussian_beam: sigma_v must be >= 0");
    VelocityDistribution d;
    d.shape = VelocityShape::gaussian;
    d.mean_v = mean_v;
    d.sigma_v = sigma_v;
    d.v_min = v_min >= 0.0 ? v_min : std::max(0.02 * mean_v, mean_v - 4.0 * sigma_v);
    d.v_max = v_max >= 0.0 ? v_max : mean_v + 4.0 * sigma_v;
    if (sigma_v > 0.0 && d.v_min >= d.v_max)
        throw std::domain_error("make_gaussian_beam: empty truncation window");
    return d;
}

VelocityDistribution make_effusive_beam(double most_probable_v, double v_min, double v_max) {
    if (most_probable_v <= 0.0)
        throw std::domain_error("make_effusive_beam: velocity must be positive");
    VelocityDistribution d;
    d.shape = VelocityShape::effusive_flux;
    d.mean_v = most_probable_v;
    double vt = most_probable_v * std::sqrt(2.0 / 3.0);
    d.v_min = v_min >= 0.0 ? v_min : 0.0;
    d.v_max = v_max >= 0.0 ? v_max : 4.0 * vt;
    if (d.v_min >= d.v_max)
        throw std::domain_error("make_effusive_beam: empty truncation window");
    return d;
}

// --------------------------------------------------------------------------
// InterferencePattern
// --------------------------------------------------------------------------

double InterferencePattern::value_at(double x) const {
    if (fourier_coeffs.empty())
        throw std::domain_error("value_at: pattern has no Fourier coefficients");
    double s = fourier_coeffs[0].real();
    double base = 2.0 * std::numbers::pi * x / period;
    for (std::size_t m = 1; m < fourier_coeffs.size(); ++m) {
        double ph = base * static_cast<double>(m);
        s += 2.0 * (fourier_coeffs[m].real() * std::cos(ph) -
                    fourier_coeffs[m].imag() * std::sin(ph));
    }
    return s;
}

void InterferencePattern::resample(int n_per_period) {
    samples.resize(n_per_period);
    for (int i = 0; i < n_per_period; ++i) {
        double x = period * static_cast<double>(i) / n_per_period;
        samples[i] = {x, value_at(x)};
    }
}

// --------------------------------------------------------------------------
// elementary relations
// --------------------------------------------------------------------------

double de_broglie_wavelength(double mass, double v) {
    if (mass <= 0.0 || v <= 0.0)
        throw std::domain_error("de_broglie_wavelength: mass and velocity must be positive");
    return phys.h / (mass * v);
}

double most_probable_velocity(double T, double mass) {
    if (mass <= 0.0) throw std::domain_error("most_probable_velocity: mass must be positive");
    if (T < 0.0) throw std::domain_error("most_probable_velocity: temperature must be >= 0");
    return std::sqrt(2.0 * phys.k_B * T / mass);
}

double coherence_length(double lambda_mean, double lambda_spread) {
    if (lambda_mean <= 0.0)
        throw std::domain_error("coherence_length: mean wavelength must be positive");
    if (lambda_spread <= 0.0)
        throw std::domain_error(
            "coherence_length: zero spread, coherence length is unbounded");
    return lambda_mean * lambda_mean / lambda_spread;
}

double talbot_length(double d, double lambda_dB) {
    if (d <= 0.0 || lambda_dB <= 0.0)
        throw std::domain_error("talbot_length: period and wavelength must be positive");
    return d * d / lambda_dB;
}

std::complex<double> medium_index(double V_pot, double E) {
    if (E <= 0.0) throw std::domain_error("medium_index: energy must be positive");
    // principal branch; V > E gives a positive imaginary part (evanescent decay)
    return std::sqrt(std::complex<double>(1.0 - V_pot / E, 0.0));
}

double visibility_from_extrema(double S_max, double S_min) {
    if (S_min > S_max) throw std::domain_error("visibility_from_extrema: S_min > S_max");
    if (S_min < 0.0 || S_max <= 0.0)
        throw std::domain_error("visibility_from_extrema: signals must be non-negative");
    return (S_max - S_min) / (S_max + S_min);
}

double visibility_of_pattern(const InterferencePattern& p) {
    if (!p.fourier_coeffs.empty()) {
        double A0 = p.fourier_coeffs[0].real();
        if (A0 <= 0.0) throw std::domain_error("visibility_of_pattern: A_0 must be positive");
        if (p.fourier_coeffs.size() < 2) return 0.0;
        double v = 2.0 * std::abs(p.fourier_coeffs[1]) / A0;
        return std::clamp(v, 0.0, 1.0);
    }
    if (!p.samples.empty()) {
        double lo = p.samples[0].second, hi = p.samples[0].second;
        for (const auto& s : p.samples) {
            lo = std::min(lo, s.second);
            hi = std::max(hi, s.second);
        }
        return visibility_from_extrema(hi, lo);
    }
    throw std::domain_error("visibility_of_pattern: empty pattern");
}

} // namespace mwi
