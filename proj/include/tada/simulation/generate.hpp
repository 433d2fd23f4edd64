#pragma once

#include <cstdint>

#include "tada/simulation/scenario.hpp"
#include "tada/survival/dataset.hpp"
#include "tada/weights/target_aggregate.hpp"

namespace tada {

/// Source trial: a superpopulation of covariates and treatment is drawn, a
/// uniform subsample of source.sample subjects is kept, and each kept subject
/// gets Weibull event and censoring times. Observed time is the minimum.
SurvivalDataset generate_study_ipd(const ScenarioConfig& config, std::uint64_t seed);

struct TargetSample {
  TargetAggregate aggregate;  // moments of pseudo_ipd
  SurvivalDataset pseudo_ipd;  // uncensored, for the benchmark hazard ratio
};

TargetSample generate_target(const ScenarioConfig& config, std::uint64_t seed);

struct HazardRatio {
  double hr = 1.0;
  double ci_low = 1.0;  // Wald interval on the log scale
  double ci_high = 1.0;
};

// Unweighted treatment-only Cox fit on the target pseudo-IPD.
HazardRatio pseudo_true_hr(const SurvivalDataset& pseudo_ipd);

struct AbnormalValueSpec {
  double flip_fraction_x2 = 0.0;
  double extreme_fraction_x3 = 0.0;
  double extreme_multiplier = 3.0;  // in SDs of X3

  void validate() const;
  // Contamination types 1..7: none; X2 flips at 1% / 5%; X3 shifts at 1% / 5%; both at 1% / 5%.
  static AbnormalValueSpec preset(int type);
};

constexpr int kAbnormalTypeCount = 7;

/// floor(f N) uniformly chosen records get X2 := 1 - X2; an independent
/// floor(f N) get X3 += multiplier * SD(X3), SD taken before the shift. The
/// aggregate is recomputed from the contaminated records.
TargetSample inject_abnormal_values(const SurvivalDataset& pseudo_ipd, const AbnormalValueSpec& spec,
                                    std::uint64_t seed);

}  // namespace tada
