// Command line front end: simulate / optimize / reconstruct / validate /
// compare, all driven by a sectioned key-value config file.

#include <CLI11.hpp>
#include <iostream>

#include "lactose/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semi-batch alpha-lactose crystallizer toolbox"};
    app.require_subcommand(1);

    lactose::CommandOptions opts;
    bool print_defaults = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "config file path");
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--set", opts.overrides,
                        "override a config value (section.key=value)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the moment model");
    add_common(simulate);
    simulate->add_option("--policy", opts.policy, "constant | linear | file");
    simulate->add_flag("--print-defaults", print_defaults,
                       "print the default configuration and exit");

    CLI::App* optimize = app.add_subcommand("optimize", "solve a control scenario");
    add_common(optimize);
    optimize->add_option("--scenario", opts.scenario,
                         "d43 | nucleation | cv | seed | moment-match");
    optimize->add_option("--warm-start", opts.warm_start,
                         "solution file to warm start from");
    optimize->add_flag("--seed-opt", opts.seed_opt,
                       "co-optimize the seed moments (scenario = seed)");

    CLI::App* reconstruct = app.add_subcommand(
        "reconstruct", "maximum-entropy seed from moments");
    add_common(reconstruct);

    CLI::App* validate = app.add_subcommand(
        "validate", "cross-check the moment model against the full "
                    "size-distribution simulation");
    add_common(validate);
    validate->add_option("--policy", opts.policy, "constant | linear | file");

    std::vector<std::string> run_dirs;
    std::string compare_out = "comparison";
    CLI::App* compare = app.add_subcommand("compare", "align finished runs");
    compare->add_option("runs", run_dirs, "run directories")->required();
    compare->add_option("--out", compare_out, "comparison output directory");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults) {
        std::cout << lactose::ExperimentConfig::defaults().dump();
        return lactose::kExitOk;
    }
    if (simulate->parsed()) return lactose::cmd_simulate(opts);
    if (optimize->parsed()) return lactose::cmd_optimize(opts);
    if (reconstruct->parsed()) return lactose::cmd_reconstruct(opts);
    if (validate->parsed()) return lactose::cmd_validate(opts);
    if (compare->parsed()) return lactose::cmd_compare(run_dirs, compare_out);
    return lactose::kExitConfig;
}
