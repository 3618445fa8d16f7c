#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwi/core.hpp"
#include "mwi/decoherence.hpp"
#include "mwi/dephasing.hpp"
#include "mwi/imaging.hpp"
#include "mwi/metrology.hpp"
#include "mwi/nearfield.hpp"

namespace mwi {

// Configuration problems carry a machine-readable code and a source location.
struct ConfigError : std::runtime_error {
    enum class Code { parse, unknown_key, unit, constraint, io, numeric };

    Code code;
    int line;  // 1-based, 0 when not tied to a location
    int col;   // 1-based, 0 when not tied to a location

    ConfigError(Code c, int ln, int cl, const std::string& msg);
    static const char* code_name(Code c);
};

enum class ScenarioKind {
    farfield,
    tl_scan,
    visibility_velocity,
    decoherence_pressure,
    decoherence_thermal,
    dephasing,
    deflect,
    kdtl_power,
    deposit_image
};

const char* scenario_kind_name(ScenarioKind k);

struct SweepSpec {
    double from = 0.0;
    double to = 0.0;
    int n = 0;
    bool log_spacing = false;

    std::vector<double> values() const;
};

// Fully resolved run description; every field is in SI units.
struct Scenario {
    ScenarioKind kind = ScenarioKind::farfield;
    std::uint64_t seed = 1;
    std::string out = "out.csv";

    Particle particle;
    std::string sigma_table_path;  // set when the emission table came from a file
    VelocityDistribution beam;
    MaterialGrating g1, g3;
    bool g2_is_optical = false;
    MaterialGrating g2_material;
    OpticalGrating g2_optical;
    InterferometerGeometry geometry;

    double cutoff_phase = 20.0;
    TalbotMode mode = TalbotMode::quantum;
    int n_slits = 100;      // far-field illuminated slits
    int n_angles = 2048;

    GasEnvironment gas;
    bool has_vibration = false;
    VibrationSpec vibration;
    bool has_inertial = false;
    InertialSpec inertial;
    DeflectionElectrode electrode;
    double noise_sigma_phase = 0.0;

    SweepSpec sweep;
    DepositOptions deposit;

    TalbotSetup talbot_setup() const;  // assembled from the grating sections
};

struct ParsedConfig {
    Scenario scenario;
    std::vector<std::string> warnings;  // sections present but unused by the kind
};

ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "config");
ParsedConfig parse_config_file(const std::string& path);

// canonical SI serialization; parse(serialize(s)) reproduces s bit for bit
std::string scenario_to_config_text(const Scenario& s);

} // namespace mwi
