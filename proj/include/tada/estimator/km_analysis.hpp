#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tada/estimator/pipeline.hpp"
#include "tada/survival/kaplan_meier.hpp"

namespace tada {

enum class KmAdjustment { Original, CensoringAdjusted, Transported, FullyAdjusted };

std::string_view to_string(KmAdjustment adjustment);

struct AdjustedCurve {
  KmAdjustment adjustment;
  KMCurve curve;
};

/// Weighted Kaplan-Meier curves under up to four adjustments: none, IPCW only,
/// participation weights only, and participation x IPCW. The transported
/// variants need a target aggregate; `include_censoring` controls the IPCW ones.
/// Weighted variants are truncated at config.truncation_cutoff.
std::vector<AdjustedCurve> km_adjusted_curves(const SurvivalDataset& data, const TargetAggregate* target,
                                              const AnalysisConfig& config, bool include_censoring = true);

struct MedianEstimate {
  KmAdjustment adjustment;
  std::optional<double> median;  // nullopt: not reached
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::size_t failed_draws = 0;  // pipeline failures or medians not reached
};

// Median survival per adjustment with percentile bootstrap CIs over
// config.bootstrap_B resamples (no CIs when B == 0).
std::vector<MedianEstimate> km_medians(const SurvivalDataset& data, const TargetAggregate* target,
                                       const AnalysisConfig& config, bool include_censoring = true);

}  // namespace tada
