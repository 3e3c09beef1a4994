// Command-line front end: gen | fit | report over a shared config file.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbnn/config.hpp"
#include "fbnn/csv.hpp"
#include "fbnn/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Path to the run config file")
        ->required();
    cmd->add_option("--out-dir", flags.out_dir, "Output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "Master seed (overrides config)")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--workers", flags.workers, "Worker thread count (overrides config)");
    cmd->add_flag("--full-scale", flags.full_scale,
                  "Use the full-scale budgets (S = 200, long sampler runs)");
}

int load_and_run(const CommonFlags& flags, int (*run)(const fbnn::RunConfig&)) {
    fbnn::RunConfig cfg;
    try {
        cfg = fbnn::RunConfig::from_file(flags.config_path);
    } catch (const fbnn::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return fbnn::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return fbnn::kExitIo;
    }
    if (flags.seed_set) cfg.seed = flags.seed;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.workers > 0) cfg.workers = flags.workers;
    if (flags.full_scale) cfg.apply_full_scale();
    return run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite- vs infinite-width Bayesian neural network experiments"};
    app.require_subcommand(1);

    CommonFlags gen_flags, fit_flags, report_flags;
    CLI::App* gen = app.add_subcommand("gen", "Generate the dataset suite");
    add_common(gen, gen_flags);
    CLI::App* fit = app.add_subcommand("fit", "Fit every (dataset, model, t) unit");
    add_common(fit, fit_flags);
    CLI::App* report = app.add_subcommand("report", "Aggregate metrics and studies");
    add_common(report, report_flags);

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return load_and_run(gen_flags, fbnn::cmd_gen);
    if (fit->parsed()) return load_and_run(fit_flags, fbnn::cmd_fit);
    return load_and_run(report_flags, fbnn::cmd_report);
}
