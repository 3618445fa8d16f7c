#pragma once
#include <numbers>

namespace mwi {

// SI constants (CODATA 2018 exact values where defined). g_earth and Omega0
// follow the rounding used throughout the modelled setups (9.81 m/s^2,
// 7.292e-5 rad/s).
struct PhysicalConstants {
    double h = 6.62607015e-34;                           // Planck, J s
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);
    double k_B = 1.380649e-23;                           // J/K
    double c = 299792458.0;                              // m/s
    double amu = 1.66053906660e-27;                      // kg
    double g_earth = 9.81;                               // m/s^2
    double Omega0 = 7.292e-5;                            // Earth rotation, rad/s
    double eps0 = 8.8541878128e-12;                      // F/m
};

inline constexpr PhysicalConstants phys{};

namespace units {
inline constexpr double eV = 1.602176634e-19;            // J
// vdW wall coefficient unit used in the grating literature
inline constexpr double meV_nm3 = 1.602176634e-22 * 1e-27;   // J m^3
// molecule-gas dispersion coefficient unit
inline constexpr double eV_nm6 = 1.602176634e-19 * 1e-54;    // J m^6
inline constexpr double mbar = 100.0;                    // Pa
inline constexpr double angstrom3 = 1e-30;               // m^3
}

// chemistry convention: polarizability volume (A^3) -> SI (C m^2/V)
inline double alpha_si_from_volume(double alpha_A3) {
    return 4.0 * std::numbers::pi * phys.eps0 * alpha_A3 * units::angstrom3;
}
inline double alpha_volume_from_si(double alpha_si) {
    return alpha_si / (4.0 * std::numbers::pi * phys.eps0 * units::angstrom3);
}

} // namespace mwi
