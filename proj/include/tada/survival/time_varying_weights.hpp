#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tada/survival/dataset.hpp"

namespace tada {

struct TruncationRecord {
  std::optional<double> cutoff;  // quantile; nullopt means "no truncation"
  double threshold = 0.0;        // applied cap (+inf when cutoff is nullopt)
};

/// Per-subject weights on the dataset's event-time grid. Subject i has one
/// stored value for each grid time t <= U_i (the times at which it is at risk).
class TimeVaryingWeights {
 public:
  TimeVaryingWeights(std::vector<double> grid, std::vector<std::size_t> row_lengths,
                     std::vector<double> values);

  // Time-constant weights repeated over each subject's at-risk grid times.
  static TimeVaryingWeights broadcast(const SurvivalDataset& data, std::span<const double> subject_weights);
  static TimeVaryingWeights unit(const SurvivalDataset& data);

  const std::vector<double>& grid() const noexcept { return grid_; }
  std::size_t subject_count() const noexcept { return offsets_.size() - 1; }
  std::size_t row_length(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + offsets_[i], row_length(i)};
  }
  std::span<const double> pooled() const noexcept { return values_; }

  bool row_is_constant(std::size_t i) const;
  bool all_rows_constant() const;

  // True when grid and row lengths agree with the data's event times and at-risk counts.
  bool matches(const SurvivalDataset& data) const;
  bool same_shape(const TimeVaryingWeights& other) const;

  // Same shape, new values (must be positive).
  TimeVaryingWeights with_values(std::vector<double> values,
                                 std::optional<TruncationRecord> truncation = std::nullopt) const;

  // Set once the truncation stage has run over these weights.
  const std::optional<TruncationRecord>& truncation() const noexcept { return truncation_; }

 private:
  std::vector<double> grid_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
  std::optional<TruncationRecord> truncation_;
};

}  // namespace tada
