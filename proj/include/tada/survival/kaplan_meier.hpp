#pragma once

#include <optional>
#include <vector>

#include "tada/survival/dataset.hpp"
#include "tada/survival/time_varying_weights.hpp"

namespace tada {

struct KMCurve {
  std::vector<double> times;  // event-time grid
  std::vector<double> survival;
  std::vector<double> n_risk_weighted;
  std::vector<double> n_event_weighted;
  std::optional<double> median;  // nullopt: not reached
};

// Weighted product-limit estimator. With weights == nullptr every subject counts once.
KMCurve weighted_km(const SurvivalDataset& data, const TimeVaryingWeights* weights = nullptr);

// Right-continuous evaluation; 1 before the first event time.
double km_survival_at(const KMCurve& curve, double t);

}  // namespace tada
