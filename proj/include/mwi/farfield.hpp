#pragma once
#include <complex>
#include <vector>

#include "mwi/core.hpp"

namespace mwi {

// Complex transmission across one open slit, sampled at midpoints xi in (0, a).
struct SlitTransmission {
    double slit_width = 0.0;             // a, m
    std::vector<double> xi;              // sample positions in (0, a)
    std::vector<std::complex<double>> t; // |t| <= 1; 0 where the wall phase cut removes flux
    std::vector<double> phase;           // eikonal phase phi(xi), also where t = 0
};

// Far-field intensity over a symmetric angle grid, normalized to max = 1.
// total_flux keeps the pre-normalization integral so unitarity is testable.
struct FarFieldPattern {
    std::vector<double> angles;     // rad
    std::vector<double> intensity;  // >= 0, max = 1
    double total_flux = 0.0;        // integral of the raw intensity over the grid
};

// eikonal vdW phase: phi(xi) = C3*b/(hbar v) * (xi^-3 + (a-xi)^-3);
// samples with |phi| > cutoff_phase are treated as removed (t = 0).
SlitTransmission vdw_slit_transmission(const MaterialGrating& g, const Particle& p, double v,
                                       double cutoff_phase = 20.0, int n_samples = 1024);

// width of the central contiguous region with |phi| < threshold and |t| > 0
double effective_slit_width(const SlitTransmission& st, double threshold_phase);

// coherent n_slits sum of the dressed slit, averaged over the velocity
// distribution and convolved with a collimation top-hat
FarFieldPattern farfield_material(const MaterialGrating& g, const Particle& p,
                                  const VelocityDistribution& v_dist, double collimation,
                                  int n_slits, int n_angles = 2048,
                                  double cutoff_phase = 20.0);

// standing-light-wave phase grating: orders at multiples of lambda_dB/(lambda_L/2)
// with Bessel amplitudes J_n(phi0/2)
FarFieldPattern farfield_optical(const OpticalGrating& g, const Particle& p,
                                 const VelocityDistribution& v_dist, double collimation,
                                 int n_angles = 2048);

// translate a pattern along its periodic coordinate (circular on the grid)
FarFieldPattern shift_pattern(const FarFieldPattern& base, double shift_angle);

// Poisson(n0) photon-absorption mixture; each photon shifts by +-period_shift
// (one absorbed photon displaces the pattern by half a diffraction period)
FarFieldPattern absorption_shifted_pattern(const FarFieldPattern& base, double n0,
                                           double period_shift);

// Poisson weights truncated where the cumulative mass exceeds 1 - 1e-9
std::vector<double> poisson_weights(double n0);

} // namespace mwi
