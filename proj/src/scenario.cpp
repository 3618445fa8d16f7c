#include "mwi/scenario.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "mwi/csvio.hpp"
#include "mwi/decoherence.hpp"
#include "mwi/dephasing.hpp"
#include "mwi/farfield.hpp"
#include "mwi/imaging.hpp"
#include "mwi/metrology.hpp"
#include "mwi/nearfield.hpp"

namespace mwi {

namespace {

std::string swap_extension(const std::string& path, const std::string& ext) {
    const auto slash = path.find_last_of("/\\");
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ext;
    return path.substr(0, dot) + ext;
}

// velocity-averaged detected fringe profile over one period
InterferencePattern averaged_pattern(const TalbotSetup& setup, const Particle& p,
                                     const VelocityDistribution& beam) {
    const auto nodes = beam.quadrature(32);
    std::vector<std::complex<double>> acc;
    for (const auto& [v, w] : nodes) {
        const InterferencePattern pat = setup.mode == TalbotMode::quantum
                                            ? talbot_lau_pattern(setup, p, v)
                                            : classical_pattern(setup, p, v);
        if (pat.fourier_coeffs.size() > acc.size()) acc.resize(pat.fourier_coeffs.size());
        for (std::size_t m = 0; m < pat.fourier_coeffs.size(); ++m)
            acc[m] += w * pat.fourier_coeffs[m];
    }
    InterferencePattern out;
    out.period = setup.g3_period;
    out.fourier_coeffs = std::move(acc);
    out.resample(256);
    return out;
}

} // namespace

std::string csv_config_header(const Scenario& s) {
    std::ostringstream out;
    out << "## " << mwisim_version << "\n";
    out << "## config follows; drop '##' lines and the leading '# ' to reproduce\n";
    std::istringstream cfg(scenario_to_config_text(s));
    std::string line;
    while (std::getline(cfg, line)) {
        if (line.empty())
            out << "#\n";
        else
            out << "# " << line << '\n';
    }
    return out.str();
}

RunResult run_scenario(const Scenario& s) {
    RunResult res;
    std::ostringstream csv;
    csv << csv_config_header(s);

    switch (s.kind) {
        case ScenarioKind::farfield: {
            const FarFieldPattern pat =
                farfield_material(s.g1, s.particle, s.beam, s.geometry.collimation_angle,
                                  s.n_slits, s.n_angles, s.cutoff_phase);
            csv << "theta_rad,intensity\n";
            for (std::size_t i = 0; i < pat.angles.size(); ++i)
                csv << format_double(pat.angles[i]) << ',' << format_double(pat.intensity[i])
                    << '\n';
            break;
        }
        case ScenarioKind::tl_scan: {
            const InterferencePattern pat =
                averaged_pattern(s.talbot_setup(), s.particle, s.beam);
            csv << "x_m,signal\n";
            for (const auto& [x, val] : pat.samples)
                csv << format_double(x) << ',' << format_double(val) << '\n';
            break;
        }
        case ScenarioKind::visibility_velocity: {
            const auto grid = s.sweep.values();
            const double rel = s.beam.mean_v > 0.0 ? s.beam.sigma_v / s.beam.mean_v : 0.0;
            const auto curves =
                visibility_vs_velocity(s.talbot_setup(), s.particle, grid, {rel});
            csv << "v_mps,quantum_vdw,quantum_point,classical_vdw,classical_point\n";
            for (std::size_t i = 0; i < grid.size(); ++i) {
                csv << format_double(grid[i]);
                for (const auto& c : curves) csv << ',' << format_double(c.visibilities[i]);
                csv << '\n';
            }
            break;
        }
        case ScenarioKind::decoherence_pressure: {
            const double path = s.geometry.L12 + s.geometry.L23;
            GasEnvironment env = s.gas;
            csv << "pressure_Pa,visibility_factor\n";
            for (double p : s.sweep.values()) {
                env.pressure = p;
                csv << format_double(p) << ','
                    << format_double(collisional_visibility(env, s.beam.mean_v, path)) << '\n';
            }
            break;
        }
        case ScenarioKind::decoherence_thermal: {
            if (std::abs(s.geometry.L12 - s.geometry.L23) >
                1e-9 * (s.geometry.L12 + s.geometry.L23))
                throw std::invalid_argument("thermal scenario requires symmetric arms");
            csv << "temperature_K,visibility_factor\n";
            for (double t : s.sweep.values()) {
                const double f = thermal_visibility(s.particle, s.beam.mean_v, s.g1.period_d,
                                                    s.geometry.L12, t);
                csv << format_double(t) << ',' << format_double(f) << '\n';
            }
            break;
        }
        case ScenarioKind::dephasing: {
            csv << "quantity,value,detrimental\n";
            double total = 1.0;
            if (s.has_vibration) {
                const double f = vibration_visibility(s.vibration, s.g1.period_d);
                total *= f;
                csv << "vibration_factor," << format_double(f) << ',' << (f < 0.9 ? 1 : 0)
                    << '\n';
            }
            if (s.has_inertial) {
                InertialSpec spec = s.inertial;
                spec.tilt_theta = s.geometry.tilt_theta;
                const double a = inertial_acceleration(spec, s.beam.mean_v);
                const double f = acceleration_visibility(a, s.geometry.L12, s.g1.period_d,
                                                         s.beam.mean_v, s.beam.sigma_v);
                const double shift = fringe_shift_from_acceleration(
                    a, s.geometry.L12, s.g1.period_d, s.beam.mean_v);
                total *= f;
                csv << "acceleration_mps2," << format_double(a) << ",0\n";
                csv << "fringe_shift_rad," << format_double(shift) << ",0\n";
                csv << "acceleration_factor," << format_double(f) << ',' << (f < 0.9 ? 1 : 0)
                    << '\n';
            }
            csv << "total_factor," << format_double(total) << ',' << (total < 0.9 ? 1 : 0)
                << '\n';
            break;
        }
        case ScenarioKind::deflect: {
            const DeflectionScan scan =
                scan_fringe_vs_voltage(s.electrode, s.particle, s.geometry, s.g1.period_d,
                                       s.beam, s.sweep.values(), s.noise_sigma_phase, s.seed);
            csv << "voltage_V,phase_rad,contrast\n";
            for (std::size_t i = 0; i < scan.voltages.size(); ++i)
                csv << format_double(scan.voltages[i]) << ',' << format_double(scan.phases[i])
                    << ',' << format_double(scan.contrasts[i]) << '\n';
            break;
        }
        case ScenarioKind::kdtl_power: {
            const VisibilityCurve curve =
                kdtl_visibility_vs_power(s.talbot_setup(), s.particle, s.sweep.values(), s.beam);
            csv << "power_W,visibility\n";
            for (std::size_t i = 0; i < curve.sweep_values.size(); ++i)
                csv << format_double(curve.sweep_values[i]) << ','
                    << format_double(curve.visibilities[i]) << '\n';
            break;
        }
        case ScenarioKind::deposit_image: {
            const TalbotSetup setup = s.talbot_setup();
            const DepositImage img = simulate_deposit(
                [&](double v) { return talbot_lau_pattern(setup, s.particle, v); }, s.beam,
                s.deposit);
            const RowVisibilityTable table =
                extract_row_visibility(img, s.deposit.min_row_counts);
            csv << "row_index,y_m,v_mps,visibility,sigma_v\n";
            for (std::size_t i = 0; i < table.row_index.size(); ++i) {
                if (!table.ok[i]) continue;
                csv << table.row_index[i] << ',' << format_double(table.y[i]) << ','
                    << format_double(table.v[i]) << ',' << format_double(table.visibility[i])
                    << ',' << format_double(table.sigma[i]) << '\n';
            }
            const std::string pgm_path = swap_extension(s.out, ".pgm");
            write_deposit_pgm(img, pgm_path);
            res.outputs.push_back(pgm_path);
            break;
        }
    }

    atomic_write_text(s.out, csv.str());
    res.outputs.insert(res.outputs.begin(), s.out);
    return res;
}

} // namespace mwi
