#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mwi/config.hpp"
#include "mwi/parallel.hpp"
#include "mwi/presets.hpp"
#include "mwi/scenario.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& preset_name, bool seed_given,
           std::uint64_t seed, const std::string& out_override, int threads, bool strict) {
    if (config_path.empty() == preset_name.empty()) {
        std::cerr << "error[constraint]: give exactly one of a config file or --preset\n";
        return 2;
    }
    if (threads > 0) mwi::set_thread_count(threads);
    const std::string origin = preset_name.empty() ? config_path : "preset:" + preset_name;
    try {
        mwi::ParsedConfig pc;
        if (!preset_name.empty()) {
            const mwi::Preset* p = mwi::find_preset(preset_name);
            if (!p) {
                std::cerr << "error[constraint]: unknown preset '" << preset_name << "'\n";
                return 2;
            }
            pc = mwi::parse_config_text(p->text, origin);
        } else {
            pc = mwi::parse_config_file(config_path);
        }
        for (const auto& w : pc.warnings) std::cerr << "warning: " << w << '\n';
        if (strict && !pc.warnings.empty()) {
            std::cerr << "error[constraint]: warnings escalated by --strict\n";
            return 2;
        }
        if (seed_given) {
            pc.scenario.seed = seed;
            pc.scenario.deposit.seed = seed;
        }
        if (!out_override.empty()) pc.scenario.out = out_override;
        const mwi::RunResult res = mwi::run_scenario(pc.scenario);
        for (const auto& f : res.outputs) std::cout << "wrote " << f << '\n';
        return 0;
    } catch (const mwi::ConfigError& e) {
        std::cerr << "error[" << mwi::ConfigError::code_name(e.code) << "] " << origin << ": "
                  << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"matter-wave interferometry simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute a configuration and write its outputs");
    std::string config_path, preset_name, out_override;
    std::uint64_t seed_override = 0;
    int threads = 0;
    bool strict = false;
    run->add_option("config", config_path, "INI configuration file");
    run->add_option("--preset", preset_name, "use an embedded preset instead of a file");
    auto* seed_opt = run->add_option("--seed", seed_override, "override the RNG seed");
    run->add_option("--out", out_override, "override the output path");
    run->add_option("--threads", threads, "worker thread count (default: automatic)");
    run->add_flag("--strict", strict, "treat configuration warnings as errors");

    auto* pre = app.add_subcommand("presets", "list or show the embedded presets");
    pre->require_subcommand(1);
    auto* list = pre->add_subcommand("list", "print one preset name per line");
    std::string show_name;
    auto* show = pre->add_subcommand("show", "print a preset configuration");
    show->add_option("name", show_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& p : mwi::presets()) std::cout << p.name << '\n';
        return 0;
    }
    if (show->parsed()) {
        const mwi::Preset* p = mwi::find_preset(show_name);
        if (!p) {
            std::cerr << "error[constraint]: unknown preset '" << show_name << "'\n";
            return 2;
        }
        std::cout << p->text;
        return 0;
    }
    return do_run(config_path, preset_name, seed_opt->count() > 0, seed_override, out_override,
                  threads, strict);
}
