// command-line front end: pick an experiment, resolve its config from a
// preset / file / overrides, run it, write one csv or json artifact.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "smc/config.hpp"
#include "smc/errors.hpp"
#include "smc/experiments.hpp"

namespace {

int run_command(const std::string& experiment_flag, const std::string& config_path,
                const std::string& preset, bool have_seed, std::int64_t seed,
                const std::string& output_flag, const std::string& format_flag,
                const std::vector<std::string>& overrides, std::int64_t dicke_n) {
    smc::RunConfig cfg;
    if (!preset.empty() && !config_path.empty())
        throw smc::ConfigError("give either --preset or --config, not both");
    if (!preset.empty())
        cfg = smc::preset_config(preset);
    else if (!config_path.empty())
        cfg = smc::RunConfig::parse_file(config_path);

    if (have_seed) cfg.set("run.seed", std::to_string(seed));
    if (dicke_n >= 0) cfg.set("dicke.n_spins", std::to_string(dicke_n));
    for (const std::string& o : overrides) cfg.apply_override(o);
    if (!experiment_flag.empty()) cfg.set("run.experiment", experiment_flag);
    if (!format_flag.empty()) cfg.set("run.format", format_flag);
    if (!output_flag.empty()) cfg.set("run.output", output_flag);

    const std::string experiment = cfg.get_string_or("run.experiment", "");
    if (experiment.empty())
        throw smc::ConfigError("no experiment selected (use --experiment or run.experiment)");
    const std::string format = cfg.get_string_or("run.format", "csv");
    if (format != "csv" && format != "json")
        throw smc::ConfigError("format must be csv or json, got '" + format + "'");
    const std::string output = cfg.get_string_or("run.output", experiment + "." + format);
    cfg.get_string_or("run.preset", ""); // echoed in the header when set

    const smc::OutputTable table = smc::run_experiment(experiment, cfg);

    std::ofstream out(output, std::ios::binary);
    if (!out) throw smc::ConfigError("cannot open output file: " + output);
    if (format == "csv")
        smc::write_csv(out, table, cfg);
    else
        smc::write_json(out, table, cfg);
    out.close();
    if (!out) throw smc::ConfigError("failed writing output file: " + output);

    std::cout << experiment << ": wrote " << output << " (" << table.rows.size() << " rows)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"levitated spin-mechanics toolbox"};
    app.require_subcommand(1);

    std::string experiment, config_path, preset, output, format;
    std::vector<std::string> overrides;
    std::int64_t seed = 0, dicke_n = -1;

    CLI::App* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--experiment", experiment, "experiment name");
    run->add_option("--config", config_path, "config file (ini-like)");
    run->add_option("--preset", preset, "built-in configuration");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "rng seed");
    run->add_option("--output", output, "output path");
    run->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--override", overrides, "section.key=value, repeatable");
    run->add_option("--n", dicke_n, "shorthand for dicke.n_spins");

    CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in configurations");
    CLI::App* experiments_cmd = app.add_subcommand("experiments", "list experiment names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets_cmd->parsed()) {
            for (const std::string& p : smc::preset_names()) std::cout << p << "\n";
            return 0;
        }
        if (experiments_cmd->parsed()) {
            for (const std::string& e : smc::experiment_names()) std::cout << e << "\n";
            return 0;
        }
        return run_command(experiment, config_path, preset, seed_opt->count() > 0, seed, output,
                           format, overrides, dicke_n);
    } catch (const smc::ConfigError& e) {
        std::cerr << "config error: " << e.what();
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        if (!e.key.empty()) std::cerr << " [key " << e.key << "]";
        std::cerr << "\n";
        return 2;
    } catch (const smc::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const smc::NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
