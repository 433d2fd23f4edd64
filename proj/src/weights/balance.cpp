#include "tada/weights/balance.hpp"

#include "tada/errors.hpp"

namespace tada {

BalanceSpec build_balance_spec(std::span<const CovariateSpec> schema, const TargetAggregate& target,
                               bool include_second_moments, std::span<const std::string> covariates) {
  target.validate();
  std::vector<std::string> names;
  if (covariates.empty()) {
    for (const auto& e : target.entries) names.push_back(e.name);
  } else {
    names.assign(covariates.begin(), covariates.end());
  }

  BalanceSpec spec;
  for (const auto& name : names) {
    const TargetEntry* entry = target.find(name);
    if (entry == nullptr) throw ValidationError("balance covariate '" + name + "' has no target moment");
    const CovariateSpec* column = nullptr;
    for (const auto& c : schema)
      if (c.name == name) column = &c;
    if (column == nullptr) throw ValidationError("target covariate '" + name + "' is not in the source schema");
    if (column->kind != entry->kind)
      throw ValidationError("covariate '" + name + "' is " + std::string(to_string(column->kind)) +
                            " in the source but " + std::string(to_string(entry->kind)) + " in the target");

    spec.functions.push_back({name, 1, entry->mean, entry->mean});
    if (include_second_moments && entry->kind == CovariateKind::Continuous) {
      if (!entry->sd) throw ValidationError("second moment requested for '" + name + "' but the target has no sd");
      spec.functions.push_back({name, 2, *entry->sd * *entry->sd, entry->mean});
    }
  }
  return spec;
}

Eigen::MatrixXd center_design(const SurvivalDataset& data, const BalanceSpec& spec) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(spec.functions.size()));
  for (std::size_t k = 0; k < spec.functions.size(); ++k) {
    const auto& f = spec.functions[k];
    const std::size_t column = data.covariate_index(f.covariate);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = data[static_cast<std::size_t>(i)].covariates[column];
      const double h = f.order == 1 ? v : (v - f.reference_mean) * (v - f.reference_mean);
      x(i, static_cast<Eigen::Index>(k)) = h - f.target;
    }
  }
  return x;
}

}  // namespace tada
