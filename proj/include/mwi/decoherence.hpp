#pragma once
#include <complex>
#include <string>
#include <vector>

#include "mwi/core.hpp"

namespace mwi {

// residual background gas seen by the molecular beam
struct GasEnvironment {
    double gas_mass = 0.0;      // kg
    double temperature = 0.0;   // K
    double pressure = 0.0;      // Pa
    double C6 = 0.0;            // J m^6, vdW dispersion coefficient molecule-gas
    std::complex<double> forward_amplitude_f0{0.0, 0.0};  // m, thermally averaged f(0)
};

// most probable gas speed sqrt(2 kB T / m_gas)
double mean_gas_speed(const GasEnvironment& env);

// Total decoherence cross section for vdW scattering, averaged over the
// thermal gas motion; valid for beam speeds well below and around the gas
// speed. Minimum sits at v_beam = sqrt(5) * gas speed.
double effective_cross_section(const GasEnvironment& env, double v_beam);

// fringe-contrast survival factor exp(-n sigma_eff * path) with n = p / kB T
double collisional_visibility(const GasEnvironment& env, double v_beam, double total_path);

double collisional_mean_free_path(const GasEnvironment& env, double v_beam);

// pressure at which the contrast drops to 1/e over the given path
double pressure_for_1e_contrast(const GasEnvironment& env, double v_beam, double total_path);

VisibilityCurve collisional_visibility_vs_pressure(const GasEnvironment& env, double v_beam,
                                                   double total_path, double v0,
                                                   const std::vector<double>& pressures);

// matter-wave refractive index n = 1 + 2 pi N f(0) / k^2 of a dilute gas
std::complex<double> gas_refractive_index(double number_density,
                                          std::complex<double> forward_amplitude, double k);

// attenuation exp(-N sigma_tot L) with sigma_tot from the optical theorem
double gas_attenuation(double number_density, std::complex<double> forward_amplitude, double k,
                       double length);

// accumulated phase k (Re n - 1) L
double gas_phase_shift(double number_density, std::complex<double> forward_amplitude, double k,
                       double length);

// photons emitted per unit wavelength per unit time by a hot molecule
double spectral_emission_rate(const EmissionSpectrum& em, double temperature, double lambda);

// total emission rate over the allowed band (photons/s)
double total_emission_rate(const EmissionSpectrum& em, double temperature);

// Contrast survival against thermal photon emission in a symmetric two-arm
// near-field interferometer: period d, arm length L, beam speed v.
double thermal_visibility(const Particle& p, double v, double grating_period, double arm_length,
                          double temperature);

// internal temperature after absorbing n laser photons; clamped at 5000 K
double heated_temperature(const Particle& p, double initial_temperature, double n_photons,
                          double photon_energy, bool* clamped = nullptr);

// two-column wavelength/cross-section table (lambda in nm, sigma in m^2),
// '#' comments, ascending order; wavelengths stored internally in meters
EmissionSpectrum load_sigma_table(const std::string& path);

} // namespace mwi
