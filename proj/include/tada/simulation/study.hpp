#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tada/simulation/generate.hpp"
#include "tada/simulation/scenario.hpp"

namespace tada {

struct SimulationOptions {
  int replicates = 500;
  int bootstrap_B = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<double> truncation_cutoff = 0.95;
  bool include_second_moments = true;
  std::optional<AbnormalValueSpec> abnormal;
  double max_failure_fraction = 0.2;

  void validate() const;
};

struct StrategyOutcome {
  double hr = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
  double bootstrap_se = 0.0;
  std::size_t failed_draws = 0;
};

struct ReplicateOutcome {
  std::uint64_t replicate = 0;
  std::optional<double> pseudo_true_hr;  // nullopt: data generation or benchmark failed
  std::optional<StrategyOutcome> adjusted;
  std::optional<StrategyOutcome> ignored;
  std::string adjusted_error;
  std::string ignored_error;
  double censor_fraction_overall = 0.0;
  double censor_fraction_treated = 0.0;
  double censor_fraction_control = 0.0;
};

struct StrategySummary {
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mean_hr = 0.0;
  double mean_ci_low = 0.0;
  double mean_ci_high = 0.0;
  double bias = 0.0;       // mean(hr_r) - pseudo-true, HR scale
  double bias_low = 0.0;   // 2.5% / 97.5% quantiles of hr_r - pseudo-true
  double bias_high = 0.0;
  double coverage = 0.0;   // fraction of bootstrap CIs containing the pseudo-true HR
  double monte_carlo_sd = 0.0;
  double mean_bootstrap_se = 0.0;
};

struct ScenarioSummary {
  int scenario_id = 0;
  double censor_intercept = 0.0;
  std::size_t replicates = 0;
  std::size_t failed_replicates = 0;
  double pseudo_true_hr = 0.0;  // mean over replicates
  double pseudo_true_low = 0.0;  // normal approximation
  double pseudo_true_high = 0.0;
  double mean_censor_fraction = 0.0;
  StrategySummary adjusted;
  StrategySummary ignored;
  std::vector<ReplicateOutcome> outcomes;  // in replicate order
};

ScenarioSummary summarize(const ScenarioConfig& config, std::vector<ReplicateOutcome> outcomes);

/// Replicate r draws from stream (seed, scenario id, r): study IPD, target
/// sample, optional contamination, then both censoring strategies with
/// bootstrap CIs. Strategy failures are recorded, not thrown.
ReplicateOutcome run_replicate(const ScenarioConfig& config, const SimulationOptions& options, std::uint64_t r);

// Replicates run on options.workers threads; the result does not depend on the worker count.
ScenarioSummary run_scenario(const ScenarioConfig& config, const SimulationOptions& options);

struct Distribution {
  double min = 0.0, q1 = 0.0, median = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
};

Distribution describe(std::vector<double> values);

struct CalibrationRow {
  int scenario_id = 0;
  double censor_intercept = 0.0;
  Distribution overall;
  Distribution treated;
  Distribution control;
};

// Censoring fractions of R generated study datasets per scenario (no estimation).
std::vector<CalibrationRow> censoring_calibration_report(const std::vector<ScenarioConfig>& scenarios, int replicates,
                                                         std::uint64_t seed, unsigned workers = 1);

// Pseudo-true hazard ratios of replicates 0..R-1, from the same target streams run_scenario uses.
std::vector<double> pseudo_true_benchmarks(const ScenarioConfig& config, int replicates, std::uint64_t seed,
                                           unsigned workers = 1);

struct TruncationRow {
  std::optional<double> cutoff;  // nullopt: no truncation
  ScenarioSummary summary;
};

std::vector<TruncationRow> sensitivity_truncation(const ScenarioConfig& config,
                                                  const std::vector<std::optional<double>>& cutoffs,
                                                  const SimulationOptions& options);

struct SampleSizeRow {
  std::size_t source_n = 0;
  ScenarioSummary summary;
};

std::vector<SampleSizeRow> sensitivity_sample_size(const ScenarioConfig& config, const std::vector<std::size_t>& sizes,
                                                   const SimulationOptions& options);

struct AbnormalRow {
  int type = 1;
  AbnormalValueSpec spec;
  ScenarioSummary summary;
};

std::vector<AbnormalRow> sensitivity_abnormal(const ScenarioConfig& config, const std::vector<int>& types,
                                              const SimulationOptions& options);

}  // namespace tada
