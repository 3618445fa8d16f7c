#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mwi/constants.hpp"

namespace mwi {

// ---------------------------------------------------------------------------
// domain types
// ---------------------------------------------------------------------------

enum class EmissionModel { table, powerlaw_with_gap };

// Grey-body absorption cross section model: either a measured table or a
// power law sigma0*(lambda_ref/lambda)^2 above an electronic gap.
struct EmissionSpectrum {
    EmissionModel model = EmissionModel::powerlaw_with_gap;
    std::vector<std::pair<double, double>> sigma_abs_table;  // (lambda m, sigma m^2), ascending
    double gap_energy = 0.0;      // J; photon energies below this emit nothing
    double sigma0 = 0.0;          // m^2 at lambda_ref (power-law model)
    double lambda_ref = 400e-9;   // m

    double sigma_abs(double lambda) const;   // throws outside table range in table mode
};

// The molecule under test.
struct Particle {
    double mass = 0.0;                        // kg
    double alpha_static = 0.0;                // C m^2 / V
    std::complex<double> alpha_optical{0.0, 0.0};  // C m^2 / V at the grating laser wavelength
    double sigma_abs_laser = 0.0;             // m^2 at the grating laser wavelength
    double C3_wall = 0.0;                     // J m^3
    double internal_temperature = 0.0;        // K
    double caloric_slope = 0.0;               // K per J of absorbed energy
    EmissionSpectrum emission;
};

enum class VelocityShape { gaussian, effusive_flux };

// Longitudinal beam velocity distribution, truncated to [v_min, v_max] and
// normalized there. The effusive flux shape weights by v^3 exp(-v^2/vt^2);
// mean_v is interpreted as its most probable velocity, so vt = mean_v*sqrt(2/3).
struct VelocityDistribution {
    double mean_v = 0.0;     // m/s
    double sigma_v = 0.0;    // m/s (gaussian std dev; ignored by effusive_flux)
    VelocityShape shape = VelocityShape::gaussian;
    double v_min = 0.0;      // m/s
    double v_max = 0.0;      // m/s

    bool monochromatic() const;
    double pdf(double v) const;              // normalized on [v_min, v_max]
    // quadrature nodes/weights for averaging smooth observables over the beam;
    // a monochromatic beam yields the single node (mean_v, 1).
    std::vector<std::pair<double, double>> quadrature(int n = 64) const;
};

VelocityDistribution make_gaussian_beam(double mean_v, double sigma_v,
                                        double v_min = -1.0, double v_max = -1.0);
VelocityDistribution make_effusive_beam(double most_probable_v,
                                        double v_min = -1.0, double v_max = -1.0);

struct MaterialGrating {
    double period_d = 0.0;        // m
    double open_fraction_f = 0.0; // slit width a = f*d
    double thickness_b = 0.0;     // m
    double C3 = 0.0;              // J m^3; 0 disables the wall interaction
};

struct OpticalGrating {
    double laser_wavelength = 0.0;        // m; grating period = lambda_L/2
    double phase_amplitude_phi0 = 0.0;    // rad, peak phase imprint at reference velocity
    double mean_absorbed_photons_n0 = 0.0;
    double power = 0.0;                   // W
    double waist_y = 0.0;                 // m (along the molecular beam)
    double waist_z = 0.0;                 // m

    double period() const { return 0.5 * laser_wavelength; }
};

struct InterferometerGeometry {
    double L12 = 0.0;               // m
    double L23 = 0.0;               // m
    double tilt_theta = 0.0;        // rad, interferometer plane vs gravity
    double orientation_phi = 0.0;   // rad, grating normal vs Earth rotation axis
    double collimation_angle = 0.0; // rad
};

// Periodic detected signal S(x_s) = sum_m A_m exp(2 pi i m x_s / period),
// A_{-m} = conj(A_m). fourier_coeffs stores m = 0..M.
struct InterferencePattern {
    double period = 0.0;
    std::vector<std::complex<double>> fourier_coeffs;
    std::vector<std::pair<double, double>> samples;  // (x_s, S)

    double value_at(double x) const;
    void resample(int n_per_period = 256);
};

struct VisibilityCurve {
    std::string sweep_name;
    std::vector<double> sweep_values;
    std::vector<double> visibilities;
    std::vector<double> sigmas;    // optional per-point uncertainty (empty if n/a)
    std::vector<bool> flags;       // optional per-point skip/warn flags
};

// ---------------------------------------------------------------------------
// elementary matter-wave relations
// ---------------------------------------------------------------------------

double de_broglie_wavelength(double mass, double v);        // h/(m v)
double most_probable_velocity(double T, double mass);       // sqrt(2 kB T / m)
double coherence_length(double lambda_mean, double lambda_spread);  // lambda^2/dlambda
double talbot_length(double d, double lambda_dB);           // d^2/lambda
std::complex<double> medium_index(double V_pot, double E);  // sqrt(1 - V/E), Im >= 0
double visibility_from_extrema(double S_max, double S_min);
double visibility_of_pattern(const InterferencePattern& p);

} // namespace mwi
