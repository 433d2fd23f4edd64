#include "tada/survival/time_varying_weights.hpp"

#include <cmath>

#include "tada/errors.hpp"

namespace tada {

TimeVaryingWeights::TimeVaryingWeights(std::vector<double> grid, std::vector<std::size_t> row_lengths,
                                       std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  offsets_.reserve(row_lengths.size() + 1);
  offsets_.push_back(0);
  for (auto len : row_lengths) {
    if (len > grid_.size()) throw ValidationError("weights: row longer than the time grid");
    offsets_.push_back(offsets_.back() + len);
  }
  if (offsets_.back() != values_.size()) throw ValidationError("weights: value count does not match row lengths");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("weights: every stored value must be positive and finite");
}

TimeVaryingWeights TimeVaryingWeights::broadcast(const SurvivalDataset& data, std::span<const double> subject_weights) {
  if (subject_weights.size() != data.size()) throw ValidationError("weights: one weight per subject required");
  std::vector<std::size_t> lengths(data.size());
  std::vector<double> values;
  for (std::size_t i = 0; i < data.size(); ++i) {
    lengths[i] = data.at_risk_count(i);
    values.insert(values.end(), lengths[i], subject_weights[i]);
  }
  return TimeVaryingWeights(data.event_times(), std::move(lengths), std::move(values));
}

TimeVaryingWeights TimeVaryingWeights::unit(const SurvivalDataset& data) {
  std::vector<double> ones(data.size(), 1.0);
  return broadcast(data, ones);
}

bool TimeVaryingWeights::row_is_constant(std::size_t i) const {
  auto r = row(i);
  for (std::size_t j = 1; j < r.size(); ++j)
    if (r[j] != r[0]) return false;
  return true;
}

bool TimeVaryingWeights::all_rows_constant() const {
  for (std::size_t i = 0; i < subject_count(); ++i)
    if (!row_is_constant(i)) return false;
  return true;
}

bool TimeVaryingWeights::matches(const SurvivalDataset& data) const {
  if (subject_count() != data.size() || grid_ != data.event_times()) return false;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (row_length(i) != data.at_risk_count(i)) return false;
  return true;
}

bool TimeVaryingWeights::same_shape(const TimeVaryingWeights& other) const {
  return grid_ == other.grid_ && offsets_ == other.offsets_;
}

TimeVaryingWeights TimeVaryingWeights::with_values(std::vector<double> values,
                                                   std::optional<TruncationRecord> truncation) const {
  if (values.size() != values_.size()) throw ValidationError("weights: replacement values have the wrong length");
  TimeVaryingWeights out = *this;
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("weights: every stored value must be positive and finite");
  out.values_ = std::move(values);
  out.truncation_ = truncation;
  return out;
}

}  // namespace tada
