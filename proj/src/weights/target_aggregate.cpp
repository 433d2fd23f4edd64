#include "tada/weights/target_aggregate.hpp"

#include <cmath>
#include <unordered_set>

#include "tada/errors.hpp"

namespace tada {

void TargetAggregate::validate() const {
  if (entries.empty()) throw ValidationError("target aggregate: no entries");
  if (target_n == 0) throw ValidationError("target aggregate: target_n must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    const std::string where = "target entry '" + e.name + "'";
    if (e.name.empty()) throw ValidationError("target aggregate: entry with empty name");
    if (!seen.insert(e.name).second) throw ValidationError(where + ": duplicate name");
    if (!std::isfinite(e.mean)) throw ValidationError(where + ": mean is not finite");
    if (e.kind == CovariateKind::Binary) {
      if (!(e.mean > 0.0 && e.mean < 1.0)) throw ValidationError(where + ": proportion must lie in (0, 1)");
      if (e.sd) throw ValidationError(where + ": binary entries take no sd");
    } else if (e.sd && !(*e.sd > 0.0 && std::isfinite(*e.sd))) {
      throw ValidationError(where + ": sd must be positive");
    }
  }
}

const TargetEntry* TargetAggregate::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

TargetAggregate aggregate_covariates(const SurvivalDataset& data, std::size_t target_n) {
  if (data.size() < 2) throw ValidationError("aggregate_covariates: need at least two records");
  TargetAggregate out;
  out.target_n = target_n;
  const double n = static_cast<double>(data.size());
  for (std::size_t k = 0; k < data.schema().size(); ++k) {
    double sum = 0.0;
    for (const auto& r : data.records()) sum += r.covariates[k];
    const double mean = sum / n;
    TargetEntry e{data.schema()[k].name, data.schema()[k].kind, mean, std::nullopt};
    if (e.kind == CovariateKind::Continuous) {
      double ss = 0.0;
      for (const auto& r : data.records()) ss += (r.covariates[k] - mean) * (r.covariates[k] - mean);
      e.sd = std::sqrt(ss / (n - 1.0));
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace tada
