// Command-line runner for the spectral simulation-and-control toolkit.
//
// Exit codes: 0 success, 1 configuration/input error, 2 numerical failure,
// 3 strict-mode criterion breach.

#include <CLI11.hpp>

#include <iostream>

#include <kdvbbm/kdvbbm.hpp>

namespace {

int run_command(const std::string& config_path, bool strict, const std::string& output_dir,
                long long seed_override, bool has_seed) {
    kdvbbm::ScenarioConfig sc;
    try {
        sc = kdvbbm::load_config(config_path);
        if (!output_dir.empty()) sc.output_dir = output_dir;
        if (has_seed) sc.seed = static_cast<std::uint64_t>(seed_override);
        kdvbbm::validate_config(sc);
    } catch (const kdvbbm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const kdvbbm::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const kdvbbm::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    kdvbbm::RunResult rr;
    try {
        rr = kdvbbm::run_scenario(sc);
    } catch (const kdvbbm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }

    std::cout << sc.scenario << ": wrote " << sc.output_dir << "/summary.json";
    if (!rr.criteria.empty())
        std::cout << " (" << (rr.criteria.size() - static_cast<std::size_t>(rr.failed_criteria))
                  << "/" << rr.criteria.size() << " criteria passed)";
    std::cout << "\n";
    for (const kdvbbm::Criterion& c : rr.criteria)
        if (!c.pass)
            std::cout << "  breached: " << c.name << " = " << c.value << " > " << c.threshold
                      << "\n";
    if (strict && rr.failed_criteria > 0) return 3;
    return 0;
}

int validate_command(const std::string& config_path) {
    try {
        const kdvbbm::ScenarioConfig sc = kdvbbm::load_config(config_path);
        kdvbbm::validate_config(sc);
        std::cout << "ok: " << sc.scenario << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulation and control toolkit for regularized "
                 "dispersive wave models on the torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    long long seed = 0;
    bool strict = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config_path, "JSON scenario config")->required();
    run->add_flag("--strict", strict, "exit 3 when a declared criterion is breached");
    run->add_option("--output-dir", output_dir, "override the output directory");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override the RNG seed");

    CLI::App* validate = app.add_subcommand("validate", "validate a scenario config");
    std::string validate_path;
    validate->add_option("config", validate_path, "JSON scenario config")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, strict, output_dir, seed, seed_opt->count() > 0);
    return validate_command(validate_path);
}
