#include "mwi/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mwi/constants.hpp"
#include "mwi/csvio.hpp"

namespace mwi {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawEntry {
    std::string section, key, value;
    int line = 0, col = 0;
};

std::vector<RawEntry> tokenize(const std::string& text) {
    std::vector<RawEntry> out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(ConfigError::Code::parse, line_no, 1,
                                  "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(ConfigError::Code::parse, line_no, 1, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ConfigError::Code::parse, line_no, 1,
                              "expected 'key = value' or a section header");
        RawEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        e.col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (e.section.empty())
            throw ConfigError(ConfigError::Code::parse, line_no, e.col,
                              "key outside of any [section]");
        if (e.key.empty())
            throw ConfigError(ConfigError::Code::parse, line_no, e.col, "empty key");
        if (e.value.empty())
            throw ConfigError(ConfigError::Code::parse, line_no, e.col,
                              "empty value for key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

double parse_number(const RawEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ConfigError(ConfigError::Code::parse, e.line, e.col,
                          "'" + e.value + "' is not a number (key '" + e.key + "')");
    if (!std::isfinite(x))
        throw ConfigError(ConfigError::Code::numeric, e.line, e.col,
                          "non-finite value for key '" + e.key + "'");
    return x;
}

long long parse_integer(const RawEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    const long long x = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError(ConfigError::Code::parse, e.line, e.col,
                          "'" + e.value + "' is not an integer (key '" + e.key + "')");
    return x;
}

std::uint64_t parse_unsigned(const RawEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    const unsigned long long x = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0' || e.value[0] == '-')
        throw ConfigError(ConfigError::Code::parse, e.line, e.col,
                          "'" + e.value + "' is not an unsigned integer (key '" + e.key + "')");
    return x;
}

[[noreturn]] void bad_enum(const RawEntry& e, const std::string& allowed) {
    throw ConfigError(ConfigError::Code::parse, e.line, e.col,
                      "invalid value '" + e.value + "' for key '" + e.key + "'; expected one of " +
                          allowed);
}

// scratch state resolved after all entries are read
struct RawBeam {
    double mean_v = 0.0;
    double sigma_v = -1.0;
    double sigma_rel = -1.0;
    VelocityShape shape = VelocityShape::gaussian;
    double v_min = -1.0;
    double v_max = -1.0;
};

struct KindInfo {
    ScenarioKind kind;
    const char* name;
    const char* sweep_prefix;  // nullptr when the kind takes no sweep
    const char* sweep_unit;    // canonical SI suffix for serialization
};

constexpr KindInfo kind_table[] = {
    {ScenarioKind::farfield, "farfield", nullptr, nullptr},
    {ScenarioKind::tl_scan, "tl_scan", nullptr, nullptr},
    {ScenarioKind::visibility_velocity, "visibility_velocity", "v", "mps"},
    {ScenarioKind::decoherence_pressure, "decoherence_pressure", "pressure", "Pa"},
    {ScenarioKind::decoherence_thermal, "decoherence_thermal", "temperature", "K"},
    {ScenarioKind::dephasing, "dephasing", nullptr, nullptr},
    {ScenarioKind::deflect, "deflect", "voltage", "V"},
    {ScenarioKind::kdtl_power, "kdtl_power", "power", "W"},
    {ScenarioKind::deposit_image, "deposit_image", nullptr, nullptr},
};

const KindInfo& kind_info(ScenarioKind k) {
    for (const auto& ki : kind_table)
        if (ki.kind == k) return ki;
    throw std::logic_error("unknown scenario kind");
}

// sections each scenario kind reads; anything else present becomes a warning
const std::set<std::string>& relevant_sections(ScenarioKind k) {
    static const std::map<ScenarioKind, std::set<std::string>> m = {
        {ScenarioKind::farfield, {"run", "particle", "beam", "g1", "geometry", "sim"}},
        {ScenarioKind::tl_scan,
         {"run", "particle", "beam", "g1", "g2", "g3", "geometry", "sim"}},
        {ScenarioKind::visibility_velocity,
         {"run", "particle", "beam", "g1", "g2", "g3", "geometry", "sim", "sweep"}},
        {ScenarioKind::decoherence_pressure,
         {"run", "particle", "beam", "geometry", "gas", "sweep"}},
        {ScenarioKind::decoherence_thermal,
         {"run", "particle", "beam", "g1", "geometry", "sweep"}},
        {ScenarioKind::dephasing,
         {"run", "particle", "beam", "g1", "geometry", "vibration", "inertial"}},
        {ScenarioKind::deflect,
         {"run", "particle", "beam", "g1", "geometry", "electrode", "sweep"}},
        {ScenarioKind::kdtl_power,
         {"run", "particle", "beam", "g1", "g2", "g3", "geometry", "sim", "sweep"}},
        {ScenarioKind::deposit_image,
         {"run", "particle", "beam", "g1", "g2", "g3", "geometry", "sim", "deposit"}},
    };
    return m.at(k);
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"run", {"kind", "seed", "out"}},
        {"particle",
         {"mass_kg", "mass_amu", "alpha_static_Cm2V", "alpha_static_A3", "alpha_optical_re_Cm2V",
          "alpha_optical_re_A3", "alpha_optical_im_Cm2V", "alpha_optical_im_A3",
          "sigma_abs_laser_m2", "C3_wall_Jm3", "C3_wall_meVnm3", "internal_temperature_K",
          "caloric_slope_K_per_J", "emission_model", "gap_energy_J", "gap_energy_eV", "sigma0_m2",
          "lambda_ref_m", "lambda_ref_nm", "sigma_table_path"}},
        {"beam",
         {"shape", "mean_v_mps", "sigma_v_mps", "sigma_rel", "v_min_mps", "v_max_mps"}},
        {"g1", {"period_m", "period_nm", "open_fraction", "thickness_m", "thickness_nm", "C3_Jm3",
                "C3_meVnm3"}},
        {"g2",
         {"type", "period_m", "period_nm", "open_fraction", "thickness_m", "thickness_nm",
          "C3_Jm3", "C3_meVnm3", "laser_wavelength_m", "laser_wavelength_nm", "power_W",
          "waist_y_m", "waist_y_um", "waist_z_m", "waist_z_um", "phi0_rad", "n0"}},
        {"g3", {"period_m", "period_nm", "open_fraction"}},
        {"geometry",
         {"L12_m", "L23_m", "tilt_rad", "tilt_urad", "orientation_phi_rad", "collimation_rad",
          "collimation_urad"}},
        {"sim", {"cutoff_phase_rad", "mode", "n_slits", "n_angles"}},
        {"gas",
         {"gas_mass_kg", "gas_mass_amu", "temperature_K", "pressure_Pa", "pressure_mbar",
          "C6_Jm6", "f0_re_m", "f0_im_m"}},
        {"vibration", {"model", "amplitude_m", "amplitude_nm", "frequency_Hz"}},
        {"inertial",
         {"source", "acceleration_mps2", "latitude_rad", "latitude_deg", "omega_radps"}},
        {"electrode",
         {"gradient_1perm3", "effective_length_m", "effective_length_mm", "position_z_m",
          "noise_sigma_phase_rad"}},
        {"sweep",
         {"v_from_mps", "v_to_mps", "pressure_from_Pa", "pressure_to_Pa", "pressure_from_mbar",
          "pressure_to_mbar", "temperature_from_K", "temperature_to_K", "power_from_W",
          "power_to_W", "voltage_from_V", "voltage_to_V", "n_points", "spacing"}},
        {"deposit",
         {"n_rows", "n_cols", "magnification", "flight_length_m", "total_counts",
          "min_row_counts"}},
    };
    return s;
}

[[noreturn]] void reject_key(const RawEntry& e) {
    const auto& sch = schema();
    const auto it = sch.find(e.section);
    if (it == sch.end())
        throw ConfigError(ConfigError::Code::unknown_key, e.line, e.col,
                          "unknown section [" + e.section + "]");
    // same physical quantity with an unsupported unit suffix gets a hint
    const auto us = e.key.rfind('_');
    if (us != std::string::npos) {
        const std::string base = e.key.substr(0, us + 1);
        std::string alts;
        for (const auto& k : it->second)
            if (k.size() > base.size() && k.compare(0, base.size(), base) == 0)
                alts += (alts.empty() ? "" : ", ") + k;
        if (!alts.empty())
            throw ConfigError(ConfigError::Code::unit, e.line, e.col,
                              "unsupported unit in key '" + e.key + "' of section [" + e.section +
                                  "]; known keys: " + alts);
    }
    throw ConfigError(ConfigError::Code::unknown_key, e.line, e.col,
                      "unknown key '" + e.key + "' in section [" + e.section + "]");
}

struct Parser {
    Scenario s;
    RawBeam beam;
    std::set<std::string> seen_sections;
    std::set<std::string> seen_keys;
    bool g3_given = false;

    void apply(const RawEntry& e);
    void finalize();
    void check_constraints() const;
};

void Parser::apply(const RawEntry& e) {
    const auto& sch = schema();
    const auto sec_it = sch.find(e.section);
    if (sec_it == sch.end() ||
        std::find(sec_it->second.begin(), sec_it->second.end(), e.key) == sec_it->second.end())
        reject_key(e);
    const std::string full = e.section + "." + e.key;
    if (!seen_keys.insert(full).second)
        throw ConfigError(ConfigError::Code::parse, e.line, e.col,
                          "duplicate key '" + e.key + "' in section [" + e.section + "]");
    seen_sections.insert(e.section);

    auto num = [&](double factor = 1.0) { return parse_number(e) * factor; };
    const double deg = std::numbers::pi / 180.0;

    if (e.section == "run") {
        if (e.key == "kind") {
            for (const auto& ki : kind_table)
                if (e.value == ki.name) {
                    s.kind = ki.kind;
                    return;
                }
            bad_enum(e, "the scenario kinds");
        }
        if (e.key == "seed") { s.seed = parse_unsigned(e); return; }
        if (e.key == "out") { s.out = e.value; return; }
    } else if (e.section == "particle") {
        auto& p = s.particle;
        if (e.key == "mass_kg") { p.mass = num(); return; }
        if (e.key == "mass_amu") { p.mass = num(phys.amu); return; }
        if (e.key == "alpha_static_Cm2V") { p.alpha_static = num(); return; }
        if (e.key == "alpha_static_A3") { p.alpha_static = alpha_si_from_volume(num(1e-30)); return; }
        if (e.key == "alpha_optical_re_Cm2V") { p.alpha_optical.real(num()); return; }
        if (e.key == "alpha_optical_re_A3") { p.alpha_optical.real(alpha_si_from_volume(num(1e-30))); return; }
        if (e.key == "alpha_optical_im_Cm2V") { p.alpha_optical.imag(num()); return; }
        if (e.key == "alpha_optical_im_A3") { p.alpha_optical.imag(alpha_si_from_volume(num(1e-30))); return; }
        if (e.key == "sigma_abs_laser_m2") { p.sigma_abs_laser = num(); return; }
        if (e.key == "C3_wall_Jm3") { p.C3_wall = num(); return; }
        if (e.key == "C3_wall_meVnm3") { p.C3_wall = num(units::meV_nm3); return; }
        if (e.key == "internal_temperature_K") { p.internal_temperature = num(); return; }
        if (e.key == "caloric_slope_K_per_J") { p.caloric_slope = num(); return; }
        if (e.key == "emission_model") {
            if (e.value == "powerlaw") { p.emission.model = EmissionModel::powerlaw_with_gap; return; }
            if (e.value == "table") { p.emission.model = EmissionModel::table; return; }
            bad_enum(e, "powerlaw, table");
        }
        if (e.key == "gap_energy_J") { p.emission.gap_energy = num(); return; }
        if (e.key == "gap_energy_eV") { p.emission.gap_energy = num(units::eV); return; }
        if (e.key == "sigma0_m2") { p.emission.sigma0 = num(); return; }
        if (e.key == "lambda_ref_m") { p.emission.lambda_ref = num(); return; }
        if (e.key == "lambda_ref_nm") { p.emission.lambda_ref = num(1e-9); return; }
        if (e.key == "sigma_table_path") {
            try {
                const auto table = load_sigma_table(e.value);
                p.emission.model = EmissionModel::table;
                p.emission.sigma_abs_table = table.sigma_abs_table;
                s.sigma_table_path = e.value;
            } catch (const std::exception& ex) {
                throw ConfigError(ConfigError::Code::io, e.line, e.col, ex.what());
            }
            return;
        }
    } else if (e.section == "beam") {
        if (e.key == "shape") {
            if (e.value == "gaussian") { beam.shape = VelocityShape::gaussian; return; }
            if (e.value == "effusive") { beam.shape = VelocityShape::effusive_flux; return; }
            bad_enum(e, "gaussian, effusive");
        }
        if (e.key == "mean_v_mps") { beam.mean_v = num(); return; }
        if (e.key == "sigma_v_mps") { beam.sigma_v = num(); return; }
        if (e.key == "sigma_rel") { beam.sigma_rel = num(); return; }
        if (e.key == "v_min_mps") { beam.v_min = num(); return; }
        if (e.key == "v_max_mps") { beam.v_max = num(); return; }
    } else if (e.section == "g1" || e.section == "g3") {
        MaterialGrating& g = e.section == "g1" ? s.g1 : s.g3;
        if (e.section == "g3") g3_given = true;
        if (e.key == "period_m") { g.period_d = num(); return; }
        if (e.key == "period_nm") { g.period_d = num(1e-9); return; }
        if (e.key == "open_fraction") { g.open_fraction_f = num(); return; }
        if (e.key == "thickness_m") { g.thickness_b = num(); return; }
        if (e.key == "thickness_nm") { g.thickness_b = num(1e-9); return; }
        if (e.key == "C3_Jm3") { g.C3 = num(); return; }
        if (e.key == "C3_meVnm3") { g.C3 = num(units::meV_nm3); return; }
    } else if (e.section == "g2") {
        if (e.key == "type") {
            if (e.value == "material") { s.g2_is_optical = false; return; }
            if (e.value == "optical") { s.g2_is_optical = true; return; }
            bad_enum(e, "material, optical");
        }
        auto& m = s.g2_material;
        auto& o = s.g2_optical;
        if (e.key == "period_m") { m.period_d = num(); return; }
        if (e.key == "period_nm") { m.period_d = num(1e-9); return; }
        if (e.key == "open_fraction") { m.open_fraction_f = num(); return; }
        if (e.key == "thickness_m") { m.thickness_b = num(); return; }
        if (e.key == "thickness_nm") { m.thickness_b = num(1e-9); return; }
        if (e.key == "C3_Jm3") { m.C3 = num(); return; }
        if (e.key == "C3_meVnm3") { m.C3 = num(units::meV_nm3); return; }
        if (e.key == "laser_wavelength_m") { o.laser_wavelength = num(); return; }
        if (e.key == "laser_wavelength_nm") { o.laser_wavelength = num(1e-9); return; }
        if (e.key == "power_W") { o.power = num(); return; }
        if (e.key == "waist_y_m") { o.waist_y = num(); return; }
        if (e.key == "waist_y_um") { o.waist_y = num(1e-6); return; }
        if (e.key == "waist_z_m") { o.waist_z = num(); return; }
        if (e.key == "waist_z_um") { o.waist_z = num(1e-6); return; }
        if (e.key == "phi0_rad") { o.phase_amplitude_phi0 = num(); return; }
        if (e.key == "n0") { o.mean_absorbed_photons_n0 = num(); return; }
    } else if (e.section == "geometry") {
        auto& g = s.geometry;
        if (e.key == "L12_m") { g.L12 = num(); return; }
        if (e.key == "L23_m") { g.L23 = num(); return; }
        if (e.key == "tilt_rad") { g.tilt_theta = num(); return; }
        if (e.key == "tilt_urad") { g.tilt_theta = num(1e-6); return; }
        if (e.key == "orientation_phi_rad") { g.orientation_phi = num(); return; }
        if (e.key == "collimation_rad") { g.collimation_angle = num(); return; }
        if (e.key == "collimation_urad") { g.collimation_angle = num(1e-6); return; }
    } else if (e.section == "sim") {
        if (e.key == "cutoff_phase_rad") { s.cutoff_phase = num(); return; }
        if (e.key == "mode") {
            if (e.value == "quantum") { s.mode = TalbotMode::quantum; return; }
            if (e.value == "classical") { s.mode = TalbotMode::classical; return; }
            bad_enum(e, "quantum, classical");
        }
        if (e.key == "n_slits") { s.n_slits = static_cast<int>(parse_integer(e)); return; }
        if (e.key == "n_angles") { s.n_angles = static_cast<int>(parse_integer(e)); return; }
    } else if (e.section == "gas") {
        auto& g = s.gas;
        if (e.key == "gas_mass_kg") { g.gas_mass = num(); return; }
        if (e.key == "gas_mass_amu") { g.gas_mass = num(phys.amu); return; }
        if (e.key == "temperature_K") { g.temperature = num(); return; }
        if (e.key == "pressure_Pa") { g.pressure = num(); return; }
        if (e.key == "pressure_mbar") { g.pressure = num(units::mbar); return; }
        if (e.key == "C6_Jm6") { g.C6 = num(); return; }
        if (e.key == "f0_re_m") { g.forward_amplitude_f0.real(num()); return; }
        if (e.key == "f0_im_m") { g.forward_amplitude_f0.imag(num()); return; }
    } else if (e.section == "vibration") {
        s.has_vibration = true;
        if (e.key == "model") {
            if (e.value == "gaussian_jitter") { s.vibration.model = VibrationModel::gaussian_jitter; return; }
            if (e.value == "sinusoidal") { s.vibration.model = VibrationModel::sinusoidal; return; }
            bad_enum(e, "gaussian_jitter, sinusoidal");
        }
        if (e.key == "amplitude_m") { s.vibration.amplitude = num(); return; }
        if (e.key == "amplitude_nm") { s.vibration.amplitude = num(1e-9); return; }
        if (e.key == "frequency_Hz") { s.vibration.frequency = num(); return; }
    } else if (e.section == "inertial") {
        s.has_inertial = true;
        if (e.key == "source") {
            if (e.value == "direct") { s.inertial.source = AccelerationSource::direct; return; }
            if (e.value == "gravity") { s.inertial.source = AccelerationSource::gravity_tilt; return; }
            if (e.value == "coriolis") { s.inertial.source = AccelerationSource::coriolis; return; }
            bad_enum(e, "direct, gravity, coriolis");
        }
        if (e.key == "acceleration_mps2") { s.inertial.acceleration = num(); return; }
        if (e.key == "latitude_rad") { s.inertial.latitude = num(); return; }
        if (e.key == "latitude_deg") { s.inertial.latitude = num(deg); return; }
        if (e.key == "omega_radps") { s.inertial.omega = num(); return; }
    } else if (e.section == "electrode") {
        auto& el = s.electrode;
        if (e.key == "gradient_1perm3") { el.gradient_coeff = num(); return; }
        if (e.key == "effective_length_m") { el.effective_length = num(); return; }
        if (e.key == "effective_length_mm") { el.effective_length = num(1e-3); return; }
        if (e.key == "position_z_m") { el.position_z = num(); return; }
        if (e.key == "noise_sigma_phase_rad") { s.noise_sigma_phase = num(); return; }
    } else if (e.section == "sweep") {
        const auto& ki = kind_info(s.kind);  // the kind is resolved before any entry is applied
        if (e.key == "n_points") {
            s.sweep.n = static_cast<int>(parse_integer(e));
            return;
        }
        if (e.key == "spacing") {
            if (e.value == "linear") { s.sweep.log_spacing = false; return; }
            if (e.value == "log") { s.sweep.log_spacing = true; return; }
            bad_enum(e, "linear, log");
        }
        struct Alias { const char* key; double factor; bool is_from; };
        static const Alias aliases[] = {
            {"v_from_mps", 1.0, true}, {"v_to_mps", 1.0, false},
            {"pressure_from_Pa", 1.0, true}, {"pressure_to_Pa", 1.0, false},
            {"pressure_from_mbar", units::mbar, true}, {"pressure_to_mbar", units::mbar, false},
            {"temperature_from_K", 1.0, true}, {"temperature_to_K", 1.0, false},
            {"power_from_W", 1.0, true}, {"power_to_W", 1.0, false},
            {"voltage_from_V", 1.0, true}, {"voltage_to_V", 1.0, false},
        };
        for (const auto& al : aliases) {
            if (e.key != al.key) continue;
            if (!ki.sweep_prefix ||
                e.key.compare(0, std::string(ki.sweep_prefix).size() + 1,
                              std::string(ki.sweep_prefix) + "_") != 0)
                throw ConfigError(ConfigError::Code::constraint, e.line, e.col,
                                  "sweep key '" + e.key + "' does not apply to kind '" +
                                      ki.name + "'");
            (al.is_from ? s.sweep.from : s.sweep.to) = num(al.factor);
            return;
        }
    } else if (e.section == "deposit") {
        auto& d = s.deposit;
        if (e.key == "n_rows") { d.n_rows = static_cast<int>(parse_integer(e)); return; }
        if (e.key == "n_cols") { d.n_cols = static_cast<int>(parse_integer(e)); return; }
        if (e.key == "magnification") { d.magnification = num(); return; }
        if (e.key == "flight_length_m") { d.flight_length = num(); return; }
        if (e.key == "total_counts") { d.total_counts = num(); return; }
        if (e.key == "min_row_counts") { d.min_row_counts = num(); return; }
    }
    reject_key(e);
}

// constraint shorthand: these fire after parsing, so they carry no location
[[noreturn]] void constraint(const std::string& msg) {
    throw ConfigError(ConfigError::Code::constraint, 0, 0, msg);
}

void Parser::finalize() {
    // beam
    if (beam.mean_v <= 0.0) constraint("beam.mean_v_mps must be > 0");
    double sigma = 0.0;
    if (beam.sigma_v >= 0.0 && beam.sigma_rel >= 0.0)
        constraint("beam: give sigma_v_mps or sigma_rel, not both");
    if (beam.sigma_v >= 0.0) sigma = beam.sigma_v;
    if (beam.sigma_rel >= 0.0) sigma = beam.sigma_rel * beam.mean_v;
    if (beam.shape == VelocityShape::gaussian)
        s.beam = make_gaussian_beam(beam.mean_v, sigma, beam.v_min, beam.v_max);
    else
        s.beam = make_effusive_beam(beam.mean_v, beam.v_min, beam.v_max);

    // a missing [g3] section mirrors the first grating
    if (!g3_given) {
        s.g3.period_d = s.g1.period_d;
        s.g3.open_fraction_f = s.g1.open_fraction_f;
    } else if (s.g3.open_fraction_f <= 0.0) {
        s.g3.open_fraction_f = s.g1.open_fraction_f;
    }
    s.deposit.seed = s.seed;
}

void Parser::check_constraints() const {
    const auto& rel = relevant_sections(s.kind);
    auto need_grating = [&](const MaterialGrating& g, const char* name) {
        if (g.period_d <= 0.0) constraint(std::string(name) + ".period_m must be > 0");
        if (g.open_fraction_f <= 0.0 || g.open_fraction_f >= 1.0)
            constraint(std::string(name) + ".open_fraction must be in (0, 1)");
        if (g.C3 > 0.0 && g.thickness_b <= 0.0)
            constraint(std::string(name) + ": C3 > 0 needs thickness > 0");
    };
    if (s.particle.mass <= 0.0) constraint("particle.mass_kg must be > 0");
    if (rel.count("g1")) need_grating(s.g1, "g1");
    if (rel.count("g2")) {
        if (s.g2_is_optical) {
            const auto& o = s.g2_optical;
            if (o.laser_wavelength <= 0.0) constraint("g2.laser_wavelength_m must be > 0");
            if (o.power < 0.0) constraint("g2.power_W must be >= 0");
            if (o.power > 0.0 && o.waist_z <= 0.0)
                constraint("g2: power_W > 0 needs waist_z_m > 0");
        } else {
            need_grating(s.g2_material, "g2");
        }
    }
    if (rel.count("g3")) {
        if (s.g3.period_d <= 0.0) constraint("g3.period_m must be > 0");
        if (s.g3.open_fraction_f <= 0.0 || s.g3.open_fraction_f >= 1.0)
            constraint("g3.open_fraction must be in (0, 1)");
    }
    if (rel.count("geometry") && s.kind != ScenarioKind::farfield) {
        if (s.geometry.L12 <= 0.0 || s.geometry.L23 <= 0.0)
            constraint("geometry.L12_m and geometry.L23_m must be > 0");
    }
    if (rel.count("gas")) {
        if (s.gas.gas_mass <= 0.0) constraint("gas.gas_mass_kg must be > 0");
        if (s.gas.temperature <= 0.0) constraint("gas.temperature_K must be > 0");
        if (s.gas.C6 <= 0.0) constraint("gas.C6_Jm6 must be > 0");
    }
    if (rel.count("electrode")) {
        if (s.electrode.gradient_coeff <= 0.0) constraint("electrode.gradient_1perm3 must be > 0");
        if (s.electrode.effective_length <= 0.0)
            constraint("electrode.effective_length_m must be > 0");
        if (s.particle.alpha_static <= 0.0)
            constraint("particle.alpha_static_Cm2V must be > 0 for deflection");
    }
    if (s.kind == ScenarioKind::decoherence_thermal) {
        const auto& em = s.particle.emission;
        if (em.model == EmissionModel::powerlaw_with_gap &&
            (em.gap_energy <= 0.0 || em.sigma0 <= 0.0))
            constraint("particle: thermal run needs gap_energy_J and sigma0_m2");
        if (em.model == EmissionModel::table && em.sigma_abs_table.size() < 2)
            constraint("particle: thermal run needs a sigma table");
    }
    const auto& ki = kind_info(s.kind);
    if (ki.sweep_prefix) {
        if (s.sweep.n < 1) constraint("sweep.n_points must be >= 1");
        if (s.sweep.log_spacing && (s.sweep.from <= 0.0 || s.sweep.to <= 0.0))
            constraint("sweep: log spacing needs positive endpoints");
    }
    if (s.kind == ScenarioKind::deposit_image) {
        const auto& d = s.deposit;
        if (d.n_rows < 1 || d.n_cols < 8) constraint("deposit: need n_rows >= 1, n_cols >= 8");
        if (d.magnification <= 0.0) constraint("deposit.magnification must be > 0");
        if (d.flight_length < 0.0) constraint("deposit.flight_length_m must be >= 0");
        if (d.total_counts <= 0.0) constraint("deposit.total_counts must be > 0");
        if (!(s.beam.v_max > s.beam.v_min) || s.beam.v_min <= 0.0)
            constraint("deposit: beam.v_min_mps/v_max_mps window must be positive");
    }
}

} // namespace

ConfigError::ConfigError(Code c, int ln, int cl, const std::string& msg)
    : std::runtime_error(ln > 0 ? "line " + std::to_string(ln) + ", col " + std::to_string(cl) +
                                      ": " + msg
                                : msg),
      code(c), line(ln), col(cl) {}

const char* ConfigError::code_name(Code c) {
    switch (c) {
        case Code::parse: return "parse";
        case Code::unknown_key: return "unknown_key";
        case Code::unit: return "unit";
        case Code::constraint: return "constraint";
        case Code::io: return "io";
        case Code::numeric: return "numeric";
    }
    return "unknown";
}

const char* scenario_kind_name(ScenarioKind k) { return kind_info(k).name; }

std::vector<double> SweepSpec::values() const {
    if (n < 1) throw std::domain_error("sweep: need at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(from);
        return out;
    }
    if (log_spacing) {
        if (from <= 0.0 || to <= 0.0)
            throw std::domain_error("sweep: log spacing needs positive endpoints");
        const double ratio = std::log(to / from);
        for (int i = 0; i < n; ++i) out.push_back(from * std::exp(ratio * i / (n - 1)));
    } else {
        for (int i = 0; i < n; ++i) out.push_back(from + (to - from) * i / (n - 1));
    }
    return out;
}

TalbotSetup Scenario::talbot_setup() const {
    TalbotSetup t;
    t.g1 = g1;
    if (g2_is_optical)
        t.g2 = g2_optical;
    else
        t.g2 = g2_material;
    t.g3_period = g3.period_d;
    t.g3_open_fraction = g3.open_fraction_f;
    t.geometry = geometry;
    t.mode = mode;
    t.cutoff_phase = cutoff_phase;
    return t;
}

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
    (void)origin;
    const auto entries = tokenize(text);
    // the kind drives sweep-key validation, so resolve [run] kind first
    Parser parser;
    for (const auto& e : entries)
        if (e.section == "run" && e.key == "kind") {
            bool known = false;
            for (const auto& ki : kind_table) known = known || e.value == ki.name;
            if (!known) bad_enum(e, "the scenario kinds");
            for (const auto& ki : kind_table)
                if (e.value == ki.name) parser.s.kind = ki.kind;
        }
    bool kind_seen = false;
    for (const auto& e : entries)
        kind_seen = kind_seen || (e.section == "run" && e.key == "kind");
    if (!kind_seen) constraint("run.kind is required");

    for (const auto& e : entries) parser.apply(e);
    parser.finalize();
    parser.check_constraints();

    ParsedConfig pc;
    pc.scenario = parser.s;
    const auto& rel = relevant_sections(parser.s.kind);
    for (const auto& sec : parser.seen_sections)
        if (!rel.count(sec))
            pc.warnings.push_back("section [" + sec + "] is not used by kind '" +
                                  scenario_kind_name(parser.s.kind) + "'");
    return pc;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& ex) {
        throw ConfigError(ConfigError::Code::io, 0, 0, ex.what());
    }
    return parse_config_text(text, path);
}

namespace {

void emit(std::ostringstream& out, const char* key, double value) {
    out << key << " = " << format_double(value) << '\n';
}

} // namespace

std::string scenario_to_config_text(const Scenario& s) {
    std::ostringstream out;
    const auto& rel = relevant_sections(s.kind);
    const auto& ki = kind_info(s.kind);

    out << "[run]\n";
    out << "kind = " << ki.name << '\n';
    out << "seed = " << s.seed << '\n';
    out << "out = " << s.out << '\n';

    out << "\n[particle]\n";
    emit(out, "mass_kg", s.particle.mass);
    emit(out, "alpha_static_Cm2V", s.particle.alpha_static);
    emit(out, "alpha_optical_re_Cm2V", s.particle.alpha_optical.real());
    emit(out, "alpha_optical_im_Cm2V", s.particle.alpha_optical.imag());
    emit(out, "sigma_abs_laser_m2", s.particle.sigma_abs_laser);
    emit(out, "C3_wall_Jm3", s.particle.C3_wall);
    emit(out, "internal_temperature_K", s.particle.internal_temperature);
    emit(out, "caloric_slope_K_per_J", s.particle.caloric_slope);
    if (s.particle.emission.model == EmissionModel::powerlaw_with_gap) {
        out << "emission_model = powerlaw\n";
        emit(out, "gap_energy_J", s.particle.emission.gap_energy);
        emit(out, "sigma0_m2", s.particle.emission.sigma0);
        emit(out, "lambda_ref_m", s.particle.emission.lambda_ref);
    } else if (!s.sigma_table_path.empty()) {
        out << "sigma_table_path = " << s.sigma_table_path << '\n';
    }

    out << "\n[beam]\n";
    out << "shape = "
        << (s.beam.shape == VelocityShape::gaussian ? "gaussian" : "effusive") << '\n';
    emit(out, "mean_v_mps", s.beam.mean_v);
    if (s.beam.shape == VelocityShape::gaussian) emit(out, "sigma_v_mps", s.beam.sigma_v);
    emit(out, "v_min_mps", s.beam.v_min);
    emit(out, "v_max_mps", s.beam.v_max);

    if (rel.count("g1")) {
        out << "\n[g1]\n";
        emit(out, "period_m", s.g1.period_d);
        emit(out, "open_fraction", s.g1.open_fraction_f);
        emit(out, "thickness_m", s.g1.thickness_b);
        emit(out, "C3_Jm3", s.g1.C3);
    }
    if (rel.count("g2")) {
        out << "\n[g2]\n";
        if (s.g2_is_optical) {
            out << "type = optical\n";
            emit(out, "laser_wavelength_m", s.g2_optical.laser_wavelength);
            emit(out, "power_W", s.g2_optical.power);
            emit(out, "waist_y_m", s.g2_optical.waist_y);
            emit(out, "waist_z_m", s.g2_optical.waist_z);
            emit(out, "phi0_rad", s.g2_optical.phase_amplitude_phi0);
            emit(out, "n0", s.g2_optical.mean_absorbed_photons_n0);
        } else {
            out << "type = material\n";
            emit(out, "period_m", s.g2_material.period_d);
            emit(out, "open_fraction", s.g2_material.open_fraction_f);
            emit(out, "thickness_m", s.g2_material.thickness_b);
            emit(out, "C3_Jm3", s.g2_material.C3);
        }
    }
    if (rel.count("g3")) {
        out << "\n[g3]\n";
        emit(out, "period_m", s.g3.period_d);
        emit(out, "open_fraction", s.g3.open_fraction_f);
    }
    out << "\n[geometry]\n";
    emit(out, "L12_m", s.geometry.L12);
    emit(out, "L23_m", s.geometry.L23);
    emit(out, "tilt_rad", s.geometry.tilt_theta);
    emit(out, "orientation_phi_rad", s.geometry.orientation_phi);
    emit(out, "collimation_rad", s.geometry.collimation_angle);

    if (rel.count("sim")) {
        out << "\n[sim]\n";
        emit(out, "cutoff_phase_rad", s.cutoff_phase);
        out << "mode = " << (s.mode == TalbotMode::quantum ? "quantum" : "classical") << '\n';
        out << "n_slits = " << s.n_slits << '\n';
        out << "n_angles = " << s.n_angles << '\n';
    }
    if (rel.count("gas")) {
        out << "\n[gas]\n";
        emit(out, "gas_mass_kg", s.gas.gas_mass);
        emit(out, "temperature_K", s.gas.temperature);
        emit(out, "pressure_Pa", s.gas.pressure);
        emit(out, "C6_Jm6", s.gas.C6);
        emit(out, "f0_re_m", s.gas.forward_amplitude_f0.real());
        emit(out, "f0_im_m", s.gas.forward_amplitude_f0.imag());
    }
    if (s.has_vibration && rel.count("vibration")) {
        out << "\n[vibration]\n";
        out << "model = "
            << (s.vibration.model == VibrationModel::gaussian_jitter ? "gaussian_jitter"
                                                                     : "sinusoidal")
            << '\n';
        emit(out, "amplitude_m", s.vibration.amplitude);
        emit(out, "frequency_Hz", s.vibration.frequency);
    }
    if (s.has_inertial && rel.count("inertial")) {
        out << "\n[inertial]\n";
        const char* src = s.inertial.source == AccelerationSource::direct ? "direct"
                          : s.inertial.source == AccelerationSource::gravity_tilt ? "gravity"
                                                                                  : "coriolis";
        out << "source = " << src << '\n';
        emit(out, "acceleration_mps2", s.inertial.acceleration);
        emit(out, "latitude_rad", s.inertial.latitude);
        emit(out, "omega_radps", s.inertial.omega);
    }
    if (rel.count("electrode")) {
        out << "\n[electrode]\n";
        emit(out, "gradient_1perm3", s.electrode.gradient_coeff);
        emit(out, "effective_length_m", s.electrode.effective_length);
        emit(out, "position_z_m", s.electrode.position_z);
        emit(out, "noise_sigma_phase_rad", s.noise_sigma_phase);
    }
    if (ki.sweep_prefix) {
        out << "\n[sweep]\n";
        out << ki.sweep_prefix << "_from_" << ki.sweep_unit << " = " << format_double(s.sweep.from)
            << '\n';
        out << ki.sweep_prefix << "_to_" << ki.sweep_unit << " = " << format_double(s.sweep.to)
            << '\n';
        out << "n_points = " << s.sweep.n << '\n';
        out << "spacing = " << (s.sweep.log_spacing ? "log" : "linear") << '\n';
    }
    if (rel.count("deposit")) {
        out << "\n[deposit]\n";
        out << "n_rows = " << s.deposit.n_rows << '\n';
        out << "n_cols = " << s.deposit.n_cols << '\n';
        emit(out, "magnification", s.deposit.magnification);
        emit(out, "flight_length_m", s.deposit.flight_length);
        emit(out, "total_counts", s.deposit.total_counts);
        emit(out, "min_row_counts", s.deposit.min_row_counts);
    }
    return out.str();
}

} // namespace mwi
