#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "tada/survival/dataset.hpp"
#include "tada/weights/target_aggregate.hpp"

namespace tada {

// order 1: h(x) = x, target = target mean.
// order 2: h(x) = (x - reference_mean)^2, target = target variance.
struct BalanceFunction {
  std::string covariate;
  int order = 1;
  double target = 0.0;
  double reference_mean = 0.0;

  std::string label() const { return order == 1 ? covariate : covariate + "^2"; }
};

struct BalanceSpec {
  std::vector<BalanceFunction> functions;
};

/// Order-1 functions for every selected target entry, plus order-2 functions
/// for continuous entries when include_second_moments is set. An empty
/// `covariates` list selects every target entry.
///
/// Throws ValidationError when a selected covariate is absent from the schema
/// or the target, when schema and target disagree on its kind, or when second
/// moments are requested for a continuous entry without an sd.
BalanceSpec build_balance_spec(std::span<const CovariateSpec> schema, const TargetAggregate& target,
                               bool include_second_moments, std::span<const std::string> covariates = {});

// Column k holds h_k(X_i) - target_k.
Eigen::MatrixXd center_design(const SurvivalDataset& data, const BalanceSpec& spec);

}  // namespace tada
