#include "tada/survival/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "tada/errors.hpp"

namespace tada {

std::string_view to_string(CovariateKind kind) {
  return kind == CovariateKind::Binary ? "binary" : "continuous";
}

CovariateKind parse_covariate_kind(std::string_view text) {
  if (text == "binary") return CovariateKind::Binary;
  if (text == "continuous") return CovariateKind::Continuous;
  throw ValidationError("unknown covariate kind '" + std::string(text) + "'");
}

SurvivalDataset::SurvivalDataset(std::vector<CovariateSpec> schema, std::vector<SubjectRecord> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  std::unordered_set<std::string> names;
  for (const auto& c : schema_) {
    if (c.name.empty()) throw ValidationError("covariate with empty name");
    if (!names.insert(c.name).second) throw ValidationError("duplicate covariate '" + c.name + "'");
  }

  std::unordered_set<std::string> ids;
  ids.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    const std::string where = "record " + std::to_string(i) + " (id '" + r.id + "')";
    if (!ids.insert(r.id).second) throw ValidationError(where + ": duplicate id");
    if (!(r.observed_time > 0.0) || !std::isfinite(r.observed_time))
      throw ValidationError(where + ": observed_time must be positive and finite");
    if (r.covariates.size() != schema_.size())
      throw ValidationError(where + ": expected " + std::to_string(schema_.size()) + " covariates, got " +
                            std::to_string(r.covariates.size()));
    for (std::size_t k = 0; k < schema_.size(); ++k) {
      const double v = r.covariates[k];
      if (!std::isfinite(v)) throw ValidationError(where + ": covariate '" + schema_[k].name + "' is not finite");
      if (schema_[k].kind == CovariateKind::Binary && v != 0.0 && v != 1.0)
        throw ValidationError(where + ": binary covariate '" + schema_[k].name + "' must be 0 or 1");
    }
    if (r.event) {
      event_times_.push_back(r.observed_time);
      ++event_count_;
    }
  }
  std::sort(event_times_.begin(), event_times_.end());
  event_times_.erase(std::unique(event_times_.begin(), event_times_.end()), event_times_.end());
}

std::vector<double> SurvivalDataset::censoring_times() const {
  std::vector<double> out;
  for (const auto& r : records_)
    if (!r.event) out.push_back(r.observed_time);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<std::size_t> SurvivalDataset::find_covariate(std::string_view name) const {
  for (std::size_t k = 0; k < schema_.size(); ++k)
    if (schema_[k].name == name) return k;
  return std::nullopt;
}

std::size_t SurvivalDataset::covariate_index(std::string_view name) const {
  if (auto k = find_covariate(name)) return *k;
  throw ValidationError("covariate '" + std::string(name) + "' not in dataset schema");
}

std::size_t SurvivalDataset::at_risk_count(std::size_t i) const {
  const double u = records_[i].observed_time;
  return static_cast<std::size_t>(std::upper_bound(event_times_.begin(), event_times_.end(), u) -
                                  event_times_.begin());
}

SurvivalDataset SurvivalDataset::resample(std::span<const std::size_t> indices) const {
  std::vector<SubjectRecord> out;
  out.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    SubjectRecord r = records_.at(indices[k]);
    r.id += '#';
    r.id += std::to_string(k);
    out.push_back(std::move(r));
  }
  return SurvivalDataset(schema_, std::move(out));
}

}  // namespace tada
