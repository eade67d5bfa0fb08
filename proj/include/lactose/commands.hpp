#pragma once

#include <string>
#include <vector>

#include "lactose/config.hpp"

namespace lactose {

/// Exit codes shared by all commands.
enum ExitCode {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSimulation = 3,
    kExitOptimizer = 4,
    kExitValidation = 5,
};

struct CommandOptions {
    std::string config_path;  ///< empty = built-in defaults
    std::vector<std::string> overrides;  ///< section.key=value
    std::string out_dir;      ///< overrides output.directory when set
    std::string scenario;     ///< overrides ocp.scenario when set
    std::string policy;       ///< overrides policy.kind when set
    std::string warm_start;   ///< solution file to warm start from
    bool seed_opt = false;    ///< force scenario = seed
};

ExperimentConfig load_config(const CommandOptions& opts);

int cmd_simulate(const CommandOptions& opts);
int cmd_optimize(const CommandOptions& opts);
int cmd_reconstruct(const CommandOptions& opts);
int cmd_validate(const CommandOptions& opts);
int cmd_compare(const std::vector<std::string>& run_dirs,
                const std::string& out_dir);

/// Fixed trajectory CSV schema (documented in the README).
void write_trajectory_csv(const std::string& path, const Model& model,
                          const Trajectory& traj);

}  // namespace lactose
