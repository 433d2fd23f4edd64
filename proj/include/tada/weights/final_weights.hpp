#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tada/survival/time_varying_weights.hpp"
#include "tada/weights/participation.hpp"

namespace tada {

// Type-7 sample quantile (linear interpolation between order statistics).
double quantile_type7(std::span<const double> values, double q);

// Elementwise product of time-constant participation weights and censoring weights.
TimeVaryingWeights combine_final_weights(const ParticipationWeights& participation,
                                         const TimeVaryingWeights& censoring);

/// Caps every stored value at the `cutoff` quantile of the pooled
/// (subject, time) values. nullopt leaves values unchanged. Either way the
/// result carries a TruncationRecord; truncating twice throws std::logic_error.
TimeVaryingWeights truncate_weights(const TimeVaryingWeights& weights, std::optional<double> cutoff);

}  // namespace tada
