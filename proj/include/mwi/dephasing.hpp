#pragma once
#include <vector>

#include "mwi/core.hpp"

namespace mwi {

enum class VibrationModel { gaussian_jitter, sinusoidal };

// one vibration component of the relative grating alignment
struct VibrationSpec {
    VibrationModel model = VibrationModel::gaussian_jitter;
    double amplitude = 0.0;   // m; rms for gaussian_jitter, peak for sinusoidal
    double frequency = 0.0;   // Hz, informational
};

enum class AccelerationSource { direct, gravity_tilt, coriolis };

struct InertialSpec {
    AccelerationSource source = AccelerationSource::direct;
    double acceleration = 0.0;   // m/s^2, used by `direct`
    double tilt_theta = 0.0;     // rad, beamline tilt against horizontal
    double latitude = 0.0;       // rad
    double omega = 7.292e-5;     // rad/s, Earth rotation
};

// contrast factor of a single vibration component for fringe period d
double vibration_visibility(const VibrationSpec& spec, double period);

struct VibrationReport {
    std::vector<double> factors;     // per component
    std::vector<bool> detrimental;   // component alone costs more than 10% contrast
    double total = 1.0;
};

VibrationReport vibration_report(const std::vector<VibrationSpec>& specs, double period);

// transverse acceleration seen by a molecule at speed v
double inertial_acceleration(const InertialSpec& spec, double v);

// fringe phase a L^2 pi / (d v^2) of a symmetric two-grating lever
double fringe_shift_from_acceleration(double acceleration, double arm_length, double period,
                                      double v);

// velocity-dispersion contrast of that phase for a gaussian beam
double acceleration_visibility(double acceleration, double arm_length, double period,
                               double mean_v, double sigma_v);

} // namespace mwi
