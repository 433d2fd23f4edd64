#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tada {

enum class CovariateKind { Binary, Continuous };

std::string_view to_string(CovariateKind kind);
CovariateKind parse_covariate_kind(std::string_view text);

struct CovariateSpec {
  std::string name;
  CovariateKind kind = CovariateKind::Continuous;

  bool operator==(const CovariateSpec&) const = default;
};

struct SubjectRecord {
  std::string id;
  double observed_time = 0.0;
  bool event = false;
  bool treatment = false;
  std::vector<double> covariates;

  bool operator==(const SubjectRecord&) const = default;
};

/// Source-trial individual data. Immutable once constructed; the constructor
/// validates every record against the schema and throws ValidationError.
class SurvivalDataset {
 public:
  SurvivalDataset(std::vector<CovariateSpec> schema, std::vector<SubjectRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const SubjectRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<SubjectRecord>& records() const noexcept { return records_; }
  const std::vector<CovariateSpec>& schema() const noexcept { return schema_; }

  // Sorted distinct times with event = 1.
  const std::vector<double>& event_times() const noexcept { return event_times_; }
  // Sorted distinct times with event = 0.
  std::vector<double> censoring_times() const;

  std::size_t event_count() const noexcept { return event_count_; }
  std::size_t censored_count() const noexcept { return records_.size() - event_count_; }

  std::optional<std::size_t> find_covariate(std::string_view name) const;
  std::size_t covariate_index(std::string_view name) const;  // throws ValidationError

  // Number of event times t with t <= observed_time of subject i.
  std::size_t at_risk_count(std::size_t i) const;

  // Subjects drawn by index (with repetition). Ids get a "#k" suffix to stay unique.
  SurvivalDataset resample(std::span<const std::size_t> indices) const;

  bool operator==(const SurvivalDataset& other) const {
    return schema_ == other.schema_ && records_ == other.records_;
  }

 private:
  std::vector<CovariateSpec> schema_;
  std::vector<SubjectRecord> records_;
  std::vector<double> event_times_;
  std::size_t event_count_ = 0;
};

}  // namespace tada
