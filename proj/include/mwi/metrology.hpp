#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "mwi/core.hpp"
#include "mwi/fit.hpp"
#include "mwi/nearfield.hpp"

namespace mwi {

// Electrode pair inserted into the interferometer. The field geometry is
// condensed into one constant: E dE/dx = gradient_coeff * U^2.
struct DeflectionElectrode {
    double gradient_coeff = 0.0;    // 1/m^3
    double effective_length = 0.0;  // m
    double position_z = 0.0;        // m downstream of the first grating
};

// lever arm l (z_det - z0 - l/2) mapping force/(m v^2) to a detector shift
double deflection_lever(const DeflectionElectrode& e, const InterferometerGeometry& g);

// transverse fringe displacement at the detector for one velocity class
double deflection_shift(const DeflectionElectrode& e, const Particle& p,
                        const InterferometerGeometry& g, double voltage, double v);

struct DeflectionScan {
    std::vector<double> voltages;
    std::vector<double> phases;     // rad, beam-averaged fringe phase
    std::vector<double> contrasts;  // dispersive contrast of the shifted fringe
    double sigma_phase = 0.0;       // rad of gaussian noise applied to phases
};

DeflectionScan scan_fringe_vs_voltage(const DeflectionElectrode& e, const Particle& p,
                                      const InterferometerGeometry& g, double grating_period,
                                      const VelocityDistribution& v_dist,
                                      const std::vector<double>& voltages,
                                      double sigma_phase = 0.0, std::uint64_t seed = 0);

struct PolarizabilityFit {
    double alpha = 0.0;        // C m^2 / V
    double sigma_alpha = 0.0;
    FitResult fit;
};

// invert the quadratic phase-vs-voltage law for the static polarizability
PolarizabilityFit fit_static_polarizability(const DeflectionScan& scan,
                                            const DeflectionElectrode& e, double mass,
                                            const VelocityDistribution& v_dist,
                                            double grating_period,
                                            const InterferometerGeometry& g);

struct OpticalPolarizabilityFit {
    std::complex<double> alpha{0.0, 0.0};  // C m^2 / V at the grating laser
    double sigma_abs = 0.0;                // m^2, from Im alpha
    double sigma_alpha_re = 0.0;
    double sigma_alpha_im = 0.0;
    FitResult fit;
};

// fit (Re alpha, Im alpha) to a measured KDTLI visibility-vs-power curve
OpticalPolarizabilityFit fit_optical_polarizability(const TalbotSetup& setup,
                                                    const Particle& base,
                                                    const std::vector<double>& powers,
                                                    const std::vector<double>& visibilities,
                                                    const VelocityDistribution& v_dist);

} // namespace mwi
