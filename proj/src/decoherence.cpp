#include "mwi/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mwi/constants.hpp"
#include "mwi/quadrature.hpp"

namespace mwi {

namespace {

constexpr double pi = std::numbers::pi;

// 4 pi Gamma(9/10) / (5 sin(pi/5)); from the 1/r^6 eikonal phase average
constexpr double vdw_prefactor = 4.569282494788091;

void check_env(const GasEnvironment& env) {
    if (env.gas_mass <= 0.0) throw std::domain_error("gas environment: gas mass must be > 0");
    if (env.temperature <= 0.0) throw std::domain_error("gas environment: temperature must be > 0");
    if (env.pressure < 0.0) throw std::domain_error("gas environment: pressure must be >= 0");
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace

double mean_gas_speed(const GasEnvironment& env) {
    check_env(env);
    return std::sqrt(2.0 * phys.k_B * env.temperature / env.gas_mass);
}

double effective_cross_section(const GasEnvironment& env, double v_beam) {
    check_env(env);
    if (env.C6 <= 0.0) throw std::domain_error("effective_cross_section: C6 must be > 0");
    if (v_beam <= 0.0) throw std::domain_error("effective_cross_section: beam speed must be > 0");
    const double vg = mean_gas_speed(env);
    const double base = std::pow(3.0 * pi * env.C6 / (2.0 * phys.hbar), 0.4);
    const double ratio = v_beam / vg;
    return vdw_prefactor * base * std::pow(vg, 0.6) / v_beam * (1.0 + ratio * ratio / 5.0);
}

double collisional_visibility(const GasEnvironment& env, double v_beam, double total_path) {
    if (total_path < 0.0) throw std::domain_error("collisional_visibility: path must be >= 0");
    if (env.pressure == 0.0) return 1.0;
    const double sigma = effective_cross_section(env, v_beam);
    const double n = env.pressure / (phys.k_B * env.temperature);
    return std::exp(-n * sigma * total_path);
}

double collisional_mean_free_path(const GasEnvironment& env, double v_beam) {
    const double sigma = effective_cross_section(env, v_beam);
    if (env.pressure <= 0.0)
        throw std::domain_error("collisional_mean_free_path: pressure must be > 0");
    const double n = env.pressure / (phys.k_B * env.temperature);
    return 1.0 / (n * sigma);
}

double pressure_for_1e_contrast(const GasEnvironment& env, double v_beam, double total_path) {
    if (total_path <= 0.0) throw std::domain_error("pressure_for_1e_contrast: path must be > 0");
    const double sigma = effective_cross_section(env, v_beam);
    return phys.k_B * env.temperature / (sigma * total_path);
}

VisibilityCurve collisional_visibility_vs_pressure(const GasEnvironment& env, double v_beam,
                                                   double total_path, double v0,
                                                   const std::vector<double>& pressures) {
    VisibilityCurve curve;
    curve.sweep_name = "pressure";
    curve.sweep_values = pressures;
    curve.visibilities.reserve(pressures.size());
    GasEnvironment e = env;
    for (double p : pressures) {
        if (p < 0.0) throw std::domain_error("pressure sweep: pressure must be >= 0");
        e.pressure = p;
        curve.visibilities.push_back(v0 * collisional_visibility(e, v_beam, total_path));
    }
    return curve;
}

std::complex<double> gas_refractive_index(double number_density,
                                          std::complex<double> forward_amplitude, double k) {
    if (number_density < 0.0) throw std::domain_error("gas_refractive_index: density must be >= 0");
    if (k <= 0.0) throw std::domain_error("gas_refractive_index: wavenumber must be > 0");
    return 1.0 + 2.0 * pi * number_density * forward_amplitude / (k * k);
}

double gas_attenuation(double number_density, std::complex<double> forward_amplitude, double k,
                       double length) {
    if (length < 0.0) throw std::domain_error("gas_attenuation: length must be >= 0");
    if (k <= 0.0) throw std::domain_error("gas_attenuation: wavenumber must be > 0");
    const double sigma_tot = 4.0 * pi * forward_amplitude.imag() / k;
    return std::exp(-number_density * sigma_tot * length);
}

double gas_phase_shift(double number_density, std::complex<double> forward_amplitude, double k,
                       double length) {
    if (length < 0.0) throw std::domain_error("gas_phase_shift: length must be >= 0");
    const std::complex<double> n = gas_refractive_index(number_density, forward_amplitude, k);
    return k * (n.real() - 1.0) * length;
}

double spectral_emission_rate(const EmissionSpectrum& em, double temperature, double lambda) {
    if (temperature <= 0.0) throw std::domain_error("spectral_emission_rate: T must be > 0");
    if (lambda <= 0.0) throw std::domain_error("spectral_emission_rate: wavelength must be > 0");
    const double sigma = em.sigma_abs(lambda);
    if (sigma <= 0.0) return 0.0;
    const double x = phys.h * phys.c / (lambda * phys.k_B * temperature);
    if (x > 700.0) return 0.0;  // thermal occupation numerically zero
    const double mode = 2.0 * pi * phys.c / (lambda * lambda * lambda * lambda);
    return sigma * mode / std::expm1(x);
}

namespace {

struct Band {
    double lo = 0.0, hi = 0.0;
};

Band emission_band(const EmissionSpectrum& em, double temperature) {
    Band b;
    b.lo = phys.h * phys.c / (700.0 * phys.k_B * temperature);
    if (em.model == EmissionModel::powerlaw_with_gap) {
        if (em.gap_energy <= 0.0)
            throw std::domain_error("emission spectrum: gap energy must be > 0");
        b.hi = phys.h * phys.c / em.gap_energy;
    } else {
        if (em.sigma_abs_table.size() < 2)
            throw std::domain_error("emission spectrum: table needs at least two points");
        b.lo = std::max(b.lo, em.sigma_abs_table.front().first);
        b.hi = em.sigma_abs_table.back().first;
    }
    return b;
}

} // namespace

double total_emission_rate(const EmissionSpectrum& em, double temperature) {
    const Band band = emission_band(em, temperature);
    if (band.hi <= band.lo) return 0.0;
    auto f = [&](double lam) { return spectral_emission_rate(em, temperature, lam); };
    return integrate_adaptive(f, band.lo, band.hi, 1e-12);
}

double thermal_visibility(const Particle& p, double v, double grating_period, double arm_length,
                          double temperature) {
    if (v <= 0.0) throw std::domain_error("thermal_visibility: velocity must be > 0");
    if (grating_period <= 0.0 || arm_length <= 0.0)
        throw std::domain_error("thermal_visibility: geometry must be positive");
    if (temperature <= 0.0) throw std::domain_error("thermal_visibility: T must be > 0");
    const Band band = emission_band(p.emission, temperature);
    if (band.hi <= band.lo) return 1.0;

    const double lambda_dB = de_broglie_wavelength(p.mass, v);
    const double rate_scale = total_emission_rate(p.emission, temperature);
    if (rate_scale <= 0.0) return 1.0;
    const double inner_tol = 1e-9 * rate_scale;

    // which-path separation grows to (lambda_dB/d) L at the central grating
    auto inner = [&](double z) {
        const double dx = lambda_dB / grating_period * z;
        auto f = [&](double lam) {
            const double r = spectral_emission_rate(p.emission, temperature, lam);
            if (r == 0.0) return 0.0;
            return r * (1.0 - sinc(2.0 * pi * dx / lam));
        };
        return integrate_adaptive(f, band.lo, band.hi, inner_tol);
    };
    const double outer_tol = 1e-8 * std::max(1.0, 2.0 * arm_length / v * rate_scale);
    const double expo = 2.0 / v * integrate_adaptive(inner, 0.0, arm_length, outer_tol * v / 2.0);
    return std::exp(-expo);
}

double heated_temperature(const Particle& p, double initial_temperature, double n_photons,
                          double photon_energy, bool* clamped) {
    if (initial_temperature < 0.0)
        throw std::domain_error("heated_temperature: initial temperature must be >= 0");
    if (n_photons < 0.0 || photon_energy < 0.0)
        throw std::domain_error("heated_temperature: photon number and energy must be >= 0");
    constexpr double t_cap = 5000.0;
    double t = initial_temperature + n_photons * photon_energy * p.caloric_slope;
    const bool over = t > t_cap;
    if (clamped) *clamped = over;
    return over ? t_cap : t;
}

EmissionSpectrum load_sigma_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_sigma_table: cannot open " + path);
    EmissionSpectrum em;
    em.model = EmissionModel::table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double lam, sigma;
        if (!(ss >> lam)) continue;  // blank or comment-only line
        if (!(ss >> sigma))
            throw std::runtime_error("load_sigma_table: missing cross section on line " +
                                     std::to_string(line_no));
        if (lam <= 0.0 || sigma < 0.0)
            throw std::runtime_error("load_sigma_table: bad values on line " +
                                     std::to_string(line_no));
        lam *= 1e-9;  // file column is in nm
        if (!em.sigma_abs_table.empty() && lam <= em.sigma_abs_table.back().first)
            throw std::runtime_error("load_sigma_table: wavelengths must ascend (line " +
                                     std::to_string(line_no) + ")");
        em.sigma_abs_table.emplace_back(lam, sigma);
    }
    if (em.sigma_abs_table.size() < 2)
        throw std::runtime_error("load_sigma_table: need at least two rows");
    return em;
}

} // namespace mwi
