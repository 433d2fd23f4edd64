#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tada/survival/dataset.hpp"

namespace tada {

struct TargetEntry {
  std::string name;
  CovariateKind kind = CovariateKind::Continuous;
  double mean = 0.0;  // proportion for binary covariates
  std::optional<double> sd;

  bool operator==(const TargetEntry&) const = default;
};

/// Published covariate moments of the target population.
struct TargetAggregate {
  std::vector<TargetEntry> entries;
  std::size_t target_n = 0;

  // Throws ValidationError: empty entries, binary mean outside (0,1),
  // binary with sd, sd <= 0, duplicate names, target_n == 0.
  void validate() const;
  const TargetEntry* find(const std::string& name) const;

  bool operator==(const TargetAggregate&) const = default;
};

// Sample moments of a dataset: proportions for binary covariates, mean and
// sample SD (n - 1 denominator) for continuous ones.
TargetAggregate aggregate_covariates(const SurvivalDataset& data, std::size_t target_n);

}  // namespace tada
