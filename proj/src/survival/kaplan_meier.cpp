#include "tada/survival/kaplan_meier.hpp"

#include <algorithm>

#include "tada/errors.hpp"

namespace tada {

KMCurve weighted_km(const SurvivalDataset& data, const TimeVaryingWeights* weights) {
  if (weights != nullptr && !weights->matches(data))
    throw ValidationError("weighted_km: weights do not match the dataset's event-time grid and risk sets");

  KMCurve curve;
  curve.times = data.event_times();
  const std::size_t J = curve.times.size();
  curve.n_risk_weighted.assign(J, 0.0);
  curve.n_event_weighted.assign(J, 0.0);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t len = data.at_risk_count(i);
    if (weights != nullptr) {
      const auto row = weights->row(i);
      for (std::size_t j = 0; j < len; ++j) curve.n_risk_weighted[j] += row[j];
      if (data[i].event) curve.n_event_weighted[len - 1] += row[len - 1];
    } else {
      for (std::size_t j = 0; j < len; ++j) curve.n_risk_weighted[j] += 1.0;
      if (data[i].event) curve.n_event_weighted[len - 1] += 1.0;
    }
  }

  curve.survival.resize(J);
  double s = 1.0;
  for (std::size_t j = 0; j < J; ++j) {
    if (!(curve.n_risk_weighted[j] > 0.0))
      throw ValidationError("weighted_km: zero weighted risk-set mass at an event time");
    s *= 1.0 - curve.n_event_weighted[j] / curve.n_risk_weighted[j];
    if (s < 0.0) s = 0.0;
    curve.survival[j] = s;
    if (!curve.median && s <= 0.5) curve.median = curve.times[j];
  }
  return curve;
}

double km_survival_at(const KMCurve& curve, double t) {
  auto it = std::upper_bound(curve.times.begin(), curve.times.end(), t);
  if (it == curve.times.begin()) return 1.0;
  return curve.survival[static_cast<std::size_t>(it - curve.times.begin()) - 1];
}

}  // namespace tada
