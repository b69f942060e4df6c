#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ostop/solve.hpp"

namespace ostop {

struct OracleConfig {
    bool run_brute_force = true;
    std::vector<int> gap_counts{2};
    Interval bf_window{-5.0, 5.0};
    double bf_grid_step = 0.05;
    std::vector<double> eval_points; // empty: 20 uniform points in bf_window
    bool run_monte_carlo = false;
    int mc_paths = 100000;
    double mc_dt = 1e-3;
    std::uint64_t mc_seed = 12345;
    std::vector<double> mc_points;
};

/// A parsed problem: model + reward + knobs. Built from the JSON config
/// documented in the README.
struct ProblemConfig {
    DiffusionModel model;
    RewardSpec reward;
    SolverOptions solver;
    Interval sample_range{-5.0, 5.0};
    int sample_count = 1001;
    OracleConfig oracle;
};

/// Factory for a "custom"-family diffusion referenced by name from a
/// config; receives the discount rate and the numeric params block.
using CustomDiffusionFactory =
    std::function<DiffusionModel(double alpha, const std::map<std::string, double>& params)>;

void register_custom_diffusion(const std::string& name, CustomDiffusionFactory factory);

/// Parse a config document. Throws InvalidParameterError with a readable
/// message on schema violations.
ProblemConfig parse_config_text(const std::string& json_text);
ProblemConfig parse_config_file(const std::string& path);

} // namespace ostop
