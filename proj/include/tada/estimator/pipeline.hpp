#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tada/survival/cox.hpp"
#include "tada/survival/dataset.hpp"
#include "tada/survival/time_varying_weights.hpp"
#include "tada/weights/censoring.hpp"
#include "tada/weights/participation.hpp"
#include "tada/weights/target_aggregate.hpp"

namespace tada {

enum class CensoringStrategy { Adjusted, Ignored };

std::string_view to_string(CensoringStrategy strategy);
CensoringStrategy parse_censoring_strategy(std::string_view text);

struct AnalysisConfig {
  std::vector<std::string> balance_covariates;    // empty: every target entry
  std::vector<std::string> censoring_covariates;  // selector names, "treatment" allowed; empty: see resolve
  bool include_second_moments = false;
  std::optional<double> truncation_cutoff = 0.95;
  CensoringStrategy strategy = CensoringStrategy::Adjusted;
  int bootstrap_B = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double max_failure_fraction = 0.2;

  void validate() const;
};

// Balance covariates: the configured list, or every target entry.
std::vector<std::string> resolve_balance_covariates(const AnalysisConfig& config, const TargetAggregate* target,
                                                    const SurvivalDataset& data);
// Censoring covariates: the configured list, or the balance covariates (every
// schema covariate without a target), plus treatment when both arms are present.
std::vector<Selector> resolve_censoring_selectors(const AnalysisConfig& config, const TargetAggregate* target,
                                                  const SurvivalDataset& data);

enum class PipelineStage { BalanceSpec, ParticipationWeights, CensoringWeights, FinalWeights, Truncation, OutcomeModel };

std::string_view to_string(PipelineStage stage);

class PipelineError : public std::runtime_error {
 public:
  PipelineError(PipelineStage stage, const std::string& what, std::exception_ptr cause)
      : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage), cause_(std::move(cause)) {}
  PipelineStage stage() const noexcept { return stage_; }
  const std::exception_ptr& cause() const noexcept { return cause_; }

 private:
  PipelineStage stage_;
  std::exception_ptr cause_;
};

struct WeightSummary {
  std::size_t count = 0;
  double min = 0.0, max = 0.0, mean = 0.0;
  double q50 = 0.0, q90 = 0.0, q95 = 0.0, q99 = 0.0;
};

WeightSummary summarize_weights(std::span<const double> values);

struct WeightDiagnostics {
  WeightSummary raw;    // pooled (subject, time) final weights before truncation
  WeightSummary final;  // after truncation
  double truncation_threshold = 0.0;
  double effective_sample_size = 0.0;  // final weights at the first event time
  bool censoring_adjusted = false;
  bool no_censoring = false;
  std::vector<double> zeta;
};

struct WeightingResult {
  ParticipationWeights participation;
  std::optional<CensoringWeights> censoring;
  TimeVaryingWeights raw_final;
  TimeVaryingWeights final;
};

/// Participation weights, censoring weights (strategy Adjusted), their product
/// and the truncation stage. With `target == nullptr` participation weights
/// are all one. Stage failures are rethrown as PipelineError.
WeightingResult build_final_weights(const SurvivalDataset& data, const TargetAggregate* target,
                                    const AnalysisConfig& config);

// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

WeightDiagnostics diagnose(const WeightingResult& weighting);

struct PointEstimate {
  double log_hr = 0.0;
  double hr = 1.0;
  WeightDiagnostics diagnostics;
};

// Marginal hazard ratio of treatment from a Cox model weighted by the final
// weights. Diagnostics are left empty unless requested.
PointEstimate tada_point_estimate(const SurvivalDataset& data, const TargetAggregate& target,
                                  const AnalysisConfig& config, bool with_diagnostics = true);

}  // namespace tada
