#include "tada/estimator/km_analysis.hpp"

#include "tada/estimator/bootstrap.hpp"
#include "tada/estimator/parallel.hpp"
#include "tada/weights/final_weights.hpp"

namespace tada {

std::string_view to_string(KmAdjustment adjustment) {
  switch (adjustment) {
    case KmAdjustment::Original: return "Original";
    case KmAdjustment::CensoringAdjusted: return "Original (with Censoring Adjusted)";
    case KmAdjustment::Transported: return "Transported (w/o Censoring Adjusted)";
    case KmAdjustment::FullyAdjusted: return "TADA fully adjusted";
  }
  return "unknown";
}

namespace {

std::vector<KmAdjustment> adjustments(bool have_target, bool include_censoring) {
  std::vector<KmAdjustment> out{KmAdjustment::Original};
  if (include_censoring) out.push_back(KmAdjustment::CensoringAdjusted);
  if (have_target) out.push_back(KmAdjustment::Transported);
  if (have_target && include_censoring) out.push_back(KmAdjustment::FullyAdjusted);
  return out;
}

KMCurve curve_for(KmAdjustment adjustment, const SurvivalDataset& data, const TargetAggregate* target,
                  const AnalysisConfig& config) {
  if (adjustment == KmAdjustment::Original) return weighted_km(data);
  AnalysisConfig c = config;
  const bool transported = adjustment == KmAdjustment::Transported || adjustment == KmAdjustment::FullyAdjusted;
  const bool censoring = adjustment == KmAdjustment::CensoringAdjusted || adjustment == KmAdjustment::FullyAdjusted;
  c.strategy = censoring ? CensoringStrategy::Adjusted : CensoringStrategy::Ignored;
  const WeightingResult w = build_final_weights(data, transported ? target : nullptr, c);
  return weighted_km(data, &w.final);
}

}  // namespace

std::vector<AdjustedCurve> km_adjusted_curves(const SurvivalDataset& data, const TargetAggregate* target,
                                              const AnalysisConfig& config, bool include_censoring) {
  config.validate();
  std::vector<AdjustedCurve> out;
  for (auto a : adjustments(target != nullptr, include_censoring)) out.push_back({a, curve_for(a, data, target, config)});
  return out;
}

std::vector<MedianEstimate> km_medians(const SurvivalDataset& data, const TargetAggregate* target,
                                       const AnalysisConfig& config, bool include_censoring) {
  config.validate();
  const auto kinds = adjustments(target != nullptr, include_censoring);
  std::vector<MedianEstimate> out;
  for (auto a : kinds) out.push_back({a, curve_for(a, data, target, config).median, {}, {}, 0});
  if (config.bootstrap_B == 0) return out;

  const auto B = static_cast<std::size_t>(config.bootstrap_B);
  // draws[b][k]: median of adjustment k in resample b
  std::vector<std::vector<std::optional<double>>> draws(B, std::vector<std::optional<double>>(kinds.size()));
  parallel_for(B, config.workers, [&](std::size_t b) {
    const SurvivalDataset resampled = data.resample(bootstrap_indices(data.size(), config.seed, b));
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      try {
        draws[b][k] = curve_for(kinds[k], resampled, target, config).median;
      } catch (const std::exception&) {
        draws[b][k].reset();
      }
    }
  });

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::vector<double> ok;
    for (std::size_t b = 0; b < B; ++b) {
      if (draws[b][k]) ok.push_back(*draws[b][k]);
    }
    out[k].failed_draws = B - ok.size();
    if (!ok.empty()) {
      out[k].ci_low = quantile_type7(ok, 0.025);
      out[k].ci_high = quantile_type7(ok, 0.975);
    }
  }
  return out;
}

}  // namespace tada
