#include "tada/weights/final_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tada/errors.hpp"

namespace tada {

double quantile_type7(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double x_lo = v[lo];
  if (lo + 1 >= v.size()) return x_lo;
  const double x_hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

TimeVaryingWeights combine_final_weights(const ParticipationWeights& participation,
                                         const TimeVaryingWeights& censoring) {
  if (participation.weights.size() != censoring.subject_count())
    throw ValidationError("combine_final_weights: participation and censoring weights cover different subjects");
  if (censoring.truncation())
    throw std::logic_error("combine_final_weights: censoring weights were already truncated");
  std::vector<double> values;
  values.reserve(censoring.pooled().size());
  for (std::size_t i = 0; i < censoring.subject_count(); ++i)
    for (double c : censoring.row(i)) values.push_back(participation.weights[i] * c);
  return censoring.with_values(std::move(values));
}

TimeVaryingWeights truncate_weights(const TimeVaryingWeights& weights, std::optional<double> cutoff) {
  if (weights.truncation()) throw std::logic_error("truncate_weights: weights were already truncated");
  const auto pooled = weights.pooled();
  std::vector<double> values(pooled.begin(), pooled.end());
  if (!cutoff || values.empty())
    return weights.with_values(std::move(values), TruncationRecord{cutoff, std::numeric_limits<double>::infinity()});
  if (!(*cutoff > 0.0 && *cutoff <= 1.0)) throw ValidationError("truncation cutoff must lie in (0, 1]");
  const double threshold = quantile_type7(values, *cutoff);
  for (double& v : values) v = std::min(v, threshold);
  return weights.with_values(std::move(values), TruncationRecord{cutoff, threshold});
}

}  // namespace tada
