#include "mwi/presets.hpp"

namespace mwi {

namespace {

// Fullerene far-field diffraction at a 100 nm nanograting, thermal beam.
constexpr const char* c60_farfield = R"([run]
kind = farfield
seed = 1
out = c60_farfield.csv

[particle]
mass_amu = 720
C3_wall_meVnm3 = 1.0

[beam]
shape = gaussian
mean_v_mps = 144
sigma_rel = 0.05

[g1]
period_nm = 100
open_fraction = 0.5
thickness_nm = 190
C3_meVnm3 = 1.0

[geometry]
L12_m = 1.0
L23_m = 1.0
collimation_urad = 10

[sim]
cutoff_phase_rad = 20
n_slits = 100
n_angles = 2048
)";

// Detected Talbot-Lau fringe of a heavy fullerene, one fixed velocity class.
constexpr const char* c70_tl_fig4 = R"([run]
kind = tl_scan
seed = 1
out = c70_tl_fig4.csv

[particle]
mass_amu = 840
C3_wall_meVnm3 = 10

[beam]
shape = gaussian
mean_v_mps = 115
sigma_rel = 0.0

[g1]
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g2]
type = material
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g3]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22

[sim]
cutoff_phase_rad = 20
mode = quantum
)";

// Velocity sweep of the same stack: quantum vs classical, with/without vdW.
constexpr const char* c70_tl_scan = R"([run]
kind = visibility_velocity
seed = 1
out = c70_tl_scan.csv

[particle]
mass_amu = 840
C3_wall_meVnm3 = 10

[beam]
shape = gaussian
mean_v_mps = 150
sigma_rel = 0.16

[g1]
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g2]
type = material
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g3]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22

[sim]
cutoff_phase_rad = 20
mode = quantum

[sweep]
v_from_mps = 100
v_to_mps = 220
n_points = 25
spacing = linear
)";

// Collisional contrast loss versus methane pressure.
constexpr const char* methane_pressure = R"([run]
kind = decoherence_pressure
seed = 1
out = methane_pressure.csv

[particle]
mass_amu = 840

[beam]
shape = gaussian
mean_v_mps = 100
sigma_rel = 0.0

[geometry]
L12_m = 0.22
L23_m = 0.22

[gas]
gas_mass_amu = 16
temperature_K = 300
pressure_mbar = 1e-7
C6_Jm6 = 4.65e-74

[sweep]
pressure_from_mbar = 1e-8
pressure_to_mbar = 1e-5
n_points = 13
spacing = log
)";

// Thermal-emission contrast loss of a laser-heated fullerene beam.
constexpr const char* c70_thermal = R"([run]
kind = decoherence_thermal
seed = 1
out = c70_thermal.csv

[particle]
mass_amu = 840
caloric_slope_K_per_J = 4.3988e20
emission_model = powerlaw
gap_energy_eV = 1.5
sigma0_m2 = 2.5591e-21
lambda_ref_nm = 400

[beam]
shape = gaussian
mean_v_mps = 104.5
sigma_rel = 0.0

[g1]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22

[sweep]
temperature_from_K = 1000
temperature_to_K = 3000
n_points = 21
spacing = linear
)";

// Tilt and vibration dephasing budget for the near-field stack.
constexpr const char* tilt_dephasing = R"([run]
kind = dephasing
seed = 1
out = tilt_dephasing.csv

[particle]
mass_amu = 840

[beam]
shape = gaussian
mean_v_mps = 100
sigma_rel = 0.1

[g1]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22
tilt_rad = 0.002

[vibration]
model = gaussian_jitter
amplitude_nm = 50
frequency_Hz = 150

[inertial]
source = gravity
)";

// Electrostatic deflectometry scan for the static polarizability.
constexpr const char* deflect = R"([run]
kind = deflect
seed = 1
out = deflect.csv

[particle]
mass_amu = 840
alpha_static_A3 = 102

[beam]
shape = gaussian
mean_v_mps = 100
sigma_rel = 0.05

[g1]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22

[electrode]
gradient_1perm3 = 1e7
effective_length_mm = 50
position_z_m = 0.25
noise_sigma_phase_rad = 0.0

[sweep]
voltage_from_V = 0
voltage_to_V = 1000
n_points = 21
spacing = linear
)";

// Kapitza-Dirac Talbot-Lau visibility versus grating laser power.
constexpr const char* c70_kdtl_power = R"([run]
kind = kdtl_power
seed = 1
out = c70_kdtl_power.csv

[particle]
mass_amu = 840
alpha_optical_re_A3 = 120
alpha_optical_im_Cm2V = 1.5e-39
sigma_abs_laser_m2 = 2.0e-21

[beam]
shape = gaussian
mean_v_mps = 190
sigma_rel = 0.1

[g1]
period_nm = 266
open_fraction = 0.42

[g2]
type = optical
laser_wavelength_nm = 532
power_W = 1
waist_y_um = 900
waist_z_um = 100

[g3]
period_nm = 266
open_fraction = 0.42

[geometry]
L12_m = 0.105
L23_m = 0.105

[sim]
cutoff_phase_rad = 20
mode = quantum

[sweep]
power_from_W = 0
power_to_W = 3
n_points = 25
spacing = linear
)";

// Magnified fringe deposit imaged from the fall-height-sorted beam.
constexpr const char* c70_deposit = R"([run]
kind = deposit_image
seed = 7
out = c70_deposit.csv

[particle]
mass_amu = 840
C3_wall_meVnm3 = 10

[beam]
shape = gaussian
mean_v_mps = 140
sigma_v_mps = 30
v_min_mps = 80
v_max_mps = 220

[g1]
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g2]
type = material
period_nm = 990
open_fraction = 0.48
thickness_nm = 500
C3_meVnm3 = 10

[g3]
period_nm = 990
open_fraction = 0.48

[geometry]
L12_m = 0.22
L23_m = 0.22

[sim]
cutoff_phase_rad = 20
mode = quantum

[deposit]
n_rows = 64
n_cols = 256
magnification = 300
flight_length_m = 1.5
total_counts = 5e7
min_row_counts = 10000
)";

} // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"c60_farfield", "far-field diffraction of C60 at a 100 nm grating", c60_farfield},
        {"c70_tl_fig4", "Talbot-Lau fringe profile at one velocity", c70_tl_fig4},
        {"c70_tl_scan", "visibility vs velocity, quantum/classical with/without vdW",
         c70_tl_scan},
        {"methane_pressure", "collisional decoherence vs methane pressure", methane_pressure},
        {"c70_thermal", "thermal-emission decoherence vs internal temperature", c70_thermal},
        {"tilt_dephasing", "vibration and gravity-tilt dephasing budget", tilt_dephasing},
        {"deflect", "electrostatic deflection fringe scan", deflect},
        {"c70_kdtl_power", "KDTLI visibility vs grating laser power", c70_kdtl_power},
        {"c70_deposit", "simulated fringe deposit with per-row visibility", c70_deposit},
    };
    return list;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (name == p.name) return &p;
    return nullptr;
}

} // namespace mwi
