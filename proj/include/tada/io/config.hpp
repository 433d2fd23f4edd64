#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tada/estimator/pipeline.hpp"
#include "tada/simulation/study.hpp"
#include "tada/weights/target_aggregate.hpp"

namespace tada {

/// JSON documents:
///
/// target aggregate
///   {"target_n": 2056,
///    "covariates": [{"name": "age", "kind": "continuous", "mean": 72.0, "sd": 9.5},
///                   {"name": "male", "kind": "binary", "mean": 0.651}]}
///
/// analysis
///   {"balance_covariates": [...], "censoring_covariates": [...],
///    "include_second_moments": false, "truncation": 0.95 | "none",
///    "strategy": "adjusted" | "ignored", "bootstrap": 200, "seed": 1}
///
/// simulation
///   {"scenarios": [1, 3], "censoring_levels": [20, 30], "replicates": 500,
///    "bootstrap": 200, "seed": 1, "truncation": 0.95, "include_second_moments": true,
///    "source_n": 200}
///
/// Unknown keys are rejected. Parse failures throw ValidationError.
TargetAggregate parse_target_aggregate(std::string_view json_text);
TargetAggregate read_target_aggregate(const std::filesystem::path& path);
std::string render_target_aggregate(const TargetAggregate& target);

AnalysisConfig parse_analysis_config(std::string_view json_text);
AnalysisConfig read_analysis_config(const std::filesystem::path& path);
std::string render_analysis_config(const AnalysisConfig& config);

struct SimulationPlan {
  std::vector<ScenarioConfig> scenarios;
  SimulationOptions options;
};

SimulationPlan parse_simulation_plan(std::string_view json_text);
SimulationPlan read_simulation_plan(const std::filesystem::path& path);

}  // namespace tada
