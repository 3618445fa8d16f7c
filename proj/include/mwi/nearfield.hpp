#pragma once
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "mwi/core.hpp"

namespace mwi {

// Fourier coefficients b_j, j in [-J, J], of a periodic complex transmission.
struct GratingCoefficients {
    int J = 0;
    std::vector<std::complex<double>> b;   // index j + J

    std::complex<double> at(int j) const {
        if (j < -J || j > J) return {0.0, 0.0};
        return b[static_cast<std::size_t>(j + J)];
    }
    double power_sum() const;              // sum |b_j|^2
};

// b_j = (1/d) integral t(x) exp(-2 pi i j x / d) dx, trapezoid on the uniform
// periodic grid x_i = i d / N. Requires N >= 8 J.
GratingCoefficients grating_fourier_coeffs(const std::vector<std::complex<double>>& t_samples,
                                           int J);

// material grating with eikonal vdW dressing, slit centered at d/2
GratingCoefficients material_grating_coeffs(const MaterialGrating& g, const Particle& p,
                                            double v, double cutoff_phase, int J);

// standing-wave phase grating exp(i phi0 cos^2(pi x / d2)); |b_j| = |J_j(phi0/2)|
GratingCoefficients optical_grating_coeffs(double phi0, int J);

// binary absorption mask coefficients f sinc(pi m f), m = 0..M
std::vector<double> binary_mask_coeffs(double f, int M);

enum class TalbotMode { quantum, classical };

struct TalbotSetup {
    MaterialGrating g1;
    std::variant<MaterialGrating, OpticalGrating> g2;
    double g3_period = 0.0;
    double g3_open_fraction = -1.0;   // < 0: inherit g1.open_fraction_f
    InterferometerGeometry geometry;
    TalbotMode mode = TalbotMode::quantum;
    double cutoff_phase = 20.0;       // wall-loss regularization (rad)

    double g2_period() const;
    double g3_f() const { return g3_open_fraction < 0.0 ? g1.open_fraction_f : g3_open_fraction; }
};

// KDTLI coupling: standing wave from a retro-reflected Gaussian beam of power P
// crossed at speed v through the w_z focus
double kdtl_phi0(double alpha_re, double power, double v, double waist_z);
double kdtl_n0(double sigma_abs, double power, double lambda_L, double v, double waist_z);

// molecular density harmonics rho_mu in the G3 plane, mu = -M..M (index mu+M)
std::vector<std::complex<double>> talbot_lau_density_coeffs(const TalbotSetup& setup,
                                                            const Particle& p, double v,
                                                            int M);

// detected signal behind the scanned third grating (quantum mode)
InterferencePattern talbot_lau_pattern(const TalbotSetup& setup, const Particle& p, double v);

// Newtonian moire with the eikonal-gradient vdW impulse at G2 (classical mode)
InterferencePattern classical_pattern(const TalbotSetup& setup, const Particle& p, double v);

// seeded Monte-Carlo variant of the classical computation
InterferencePattern classical_pattern_mc(const TalbotSetup& setup, const Particle& p, double v,
                                         std::uint64_t n_rays, std::uint64_t seed);

// coherent plane-wave Talbot image of a single grating at distance L
InterferencePattern talbot_selfimage(const GratingCoefficients& g2, double period,
                                     double lambda, double L);

// the four visibility-vs-velocity curves: quantum/classical x (vdW on/off);
// spread_rel is broadcast if it has one entry
std::vector<VisibilityCurve> visibility_vs_velocity(const TalbotSetup& setup, const Particle& p,
                                                    const std::vector<double>& v_grid,
                                                    const std::vector<double>& spread_rel);

// KDTLI visibility vs laser power, including photon-absorption recoil weights
VisibilityCurve kdtl_visibility_vs_power(const TalbotSetup& setup, const Particle& p,
                                         const std::vector<double>& powers,
                                         const VelocityDistribution& v_dist);

} // namespace mwi
