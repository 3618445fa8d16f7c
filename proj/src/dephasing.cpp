#include "mwi/dephasing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mwi/constants.hpp"

namespace mwi {

namespace {
constexpr double pi = std::numbers::pi;
}

double vibration_visibility(const VibrationSpec& spec, double period) {
    if (period <= 0.0) throw std::domain_error("vibration_visibility: period must be > 0");
    if (spec.amplitude < 0.0) throw std::domain_error("vibration_visibility: amplitude must be >= 0");
    const double x = 2.0 * pi * spec.amplitude / period;
    switch (spec.model) {
        case VibrationModel::gaussian_jitter:
            return std::exp(-0.5 * x * x);
        case VibrationModel::sinusoidal:
            // uniform phase average of cos(x sin wt) over a cycle
            return std::abs(std::cyl_bessel_j(0, x));
    }
    throw std::invalid_argument("vibration_visibility: unknown model");
}

VibrationReport vibration_report(const std::vector<VibrationSpec>& specs, double period) {
    VibrationReport rep;
    rep.factors.reserve(specs.size());
    for (const auto& s : specs) {
        const double f = vibration_visibility(s, period);
        rep.factors.push_back(f);
        rep.detrimental.push_back(f < 0.9);
        rep.total *= f;
    }
    return rep;
}

double inertial_acceleration(const InertialSpec& spec, double v) {
    switch (spec.source) {
        case AccelerationSource::direct:
            return spec.acceleration;
        case AccelerationSource::gravity_tilt:
            return phys.g_earth * std::sin(spec.tilt_theta);
        case AccelerationSource::coriolis:
            if (v <= 0.0) throw std::domain_error("inertial_acceleration: velocity must be > 0");
            return 2.0 * v * spec.omega * std::cos(spec.latitude);
    }
    throw std::invalid_argument("inertial_acceleration: unknown source");
}

double fringe_shift_from_acceleration(double acceleration, double arm_length, double period,
                                      double v) {
    if (period <= 0.0 || arm_length < 0.0)
        throw std::domain_error("fringe_shift_from_acceleration: bad geometry");
    if (v <= 0.0) throw std::domain_error("fringe_shift_from_acceleration: velocity must be > 0");
    // ballistic sag a (L/v)^2 relative to the straight fringe grid
    return pi * acceleration * arm_length * arm_length / (period * v * v);
}

double acceleration_visibility(double acceleration, double arm_length, double period,
                               double mean_v, double sigma_v) {
    if (sigma_v < 0.0) throw std::domain_error("acceleration_visibility: sigma must be >= 0");
    if (mean_v <= 0.0) throw std::domain_error("acceleration_visibility: velocity must be > 0");
    if (period <= 0.0) throw std::domain_error("acceleration_visibility: period must be > 0");
    // first-order spread of the phase: dphi/dv sigma, gaussian average
    const double dphi_dv = 2.0 * pi * std::abs(acceleration) * arm_length * arm_length /
                           (period * mean_v * mean_v * mean_v);
    const double s = dphi_dv * sigma_v;
    return std::exp(-0.5 * s * s);
}

} // namespace mwi
