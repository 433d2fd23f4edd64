#include "tada/estimator/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tada/errors.hpp"
#include "tada/weights/balance.hpp"
#include "tada/weights/final_weights.hpp"

namespace tada {

std::string_view to_string(CensoringStrategy strategy) {
  return strategy == CensoringStrategy::Adjusted ? "adjusted" : "ignored";
}

CensoringStrategy parse_censoring_strategy(std::string_view text) {
  if (text == "adjusted") return CensoringStrategy::Adjusted;
  if (text == "ignored") return CensoringStrategy::Ignored;
  throw ValidationError("unknown censoring strategy '" + std::string(text) + "' (expected adjusted|ignored)");
}

std::string_view to_string(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::BalanceSpec: return "balance specification";
    case PipelineStage::ParticipationWeights: return "participation weights";
    case PipelineStage::CensoringWeights: return "censoring weights";
    case PipelineStage::FinalWeights: return "final weights";
    case PipelineStage::Truncation: return "truncation";
    case PipelineStage::OutcomeModel: return "outcome model";
  }
  return "unknown stage";
}

void AnalysisConfig::validate() const {
  if (bootstrap_B < 0) throw ValidationError("bootstrap count must be non-negative");
  if (truncation_cutoff && !(*truncation_cutoff > 0.0 && *truncation_cutoff <= 1.0))
    throw ValidationError("truncation cutoff must lie in (0, 1]");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
    throw ValidationError("max_failure_fraction must lie in [0, 1]");
}

std::vector<std::string> resolve_balance_covariates(const AnalysisConfig& config, const TargetAggregate* target,
                                                    const SurvivalDataset& data) {
  if (!config.balance_covariates.empty()) return config.balance_covariates;
  std::vector<std::string> out;
  if (target != nullptr) {
    for (const auto& e : target->entries) out.push_back(e.name);
  } else {
    for (const auto& c : data.schema()) out.push_back(c.name);
  }
  return out;
}

std::vector<Selector> resolve_censoring_selectors(const AnalysisConfig& config, const TargetAggregate* target,
                                                  const SurvivalDataset& data) {
  if (!config.censoring_covariates.empty()) return parse_selectors(config.censoring_covariates);
  std::vector<Selector> out;
  bool treated = false, control = false;
  for (const auto& r : data.records()) (r.treatment ? treated : control) = true;
  if (treated && control) out.push_back(Selector::treatment());
  for (const auto& name : resolve_balance_covariates(config, target, data)) out.push_back(Selector::covariate(name));
  if (out.empty()) throw ValidationError("no censoring-model covariates available");
  return out;
}

namespace {

template <class F>
auto run_stage(PipelineStage stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw PipelineError(stage, e.what(), std::current_exception());
  }
}

}  // namespace

WeightingResult build_final_weights(const SurvivalDataset& data, const TargetAggregate* target,
                                    const AnalysisConfig& config) {
  config.validate();

  ParticipationWeights participation;
  if (target != nullptr) {
    const auto names = resolve_balance_covariates(config, target, data);
    const BalanceSpec spec = run_stage(PipelineStage::BalanceSpec, [&] {
      return build_balance_spec(data.schema(), *target, config.include_second_moments, names);
    });
    participation = run_stage(PipelineStage::ParticipationWeights, [&] {
      auto p = solve_mom_weights(center_design(data, spec));
      if (!p.converged) throw ConvergenceError("method-of-moments solve did not converge");
      return p;
    });
  } else {
    participation.weights.assign(data.size(), 1.0);
    participation.converged = true;
  }

  std::optional<CensoringWeights> censoring;
  if (config.strategy == CensoringStrategy::Adjusted) {
    censoring = run_stage(PipelineStage::CensoringWeights, [&] {
      return fit_censoring_weights(data, resolve_censoring_selectors(config, target, data));
    });
  }

  TimeVaryingWeights raw = run_stage(PipelineStage::FinalWeights, [&] {
    return censoring ? combine_final_weights(participation, censoring->weights)
                     : TimeVaryingWeights::broadcast(data, participation.weights);
  });
  TimeVaryingWeights final =
      run_stage(PipelineStage::Truncation, [&] { return truncate_weights(raw, config.truncation_cutoff); });
  return {std::move(participation), std::move(censoring), std::move(raw), std::move(final)};
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

WeightSummary summarize_weights(std::span<const double> values) {
  WeightSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.q50 = quantile_type7(values, 0.50);
  s.q90 = quantile_type7(values, 0.90);
  s.q95 = quantile_type7(values, 0.95);
  s.q99 = quantile_type7(values, 0.99);
  return s;
}

WeightDiagnostics diagnose(const WeightingResult& weighting) {
  WeightDiagnostics d;
  d.raw = summarize_weights(weighting.raw_final.pooled());
  d.final = summarize_weights(weighting.final.pooled());
  d.truncation_threshold =
      weighting.final.truncation() ? weighting.final.truncation()->threshold : std::numeric_limits<double>::infinity();
  std::vector<double> first;
  for (std::size_t i = 0; i < weighting.final.subject_count(); ++i)
    if (weighting.final.row_length(i) > 0) first.push_back(weighting.final.row(i)[0]);
  d.effective_sample_size = effective_sample_size(first);
  d.censoring_adjusted = weighting.censoring.has_value();
  d.no_censoring = weighting.censoring && weighting.censoring->no_censoring;
  d.zeta = weighting.participation.zeta;
  return d;
}

PointEstimate tada_point_estimate(const SurvivalDataset& data, const TargetAggregate& target,
                                  const AnalysisConfig& config, bool with_diagnostics) {
  const WeightingResult weighting = build_final_weights(data, &target, config);
  if (!weighting.final.truncation()) throw std::logic_error("outcome model requires truncated final weights");
  const Selector design[] = {Selector::treatment()};
  const CoxFit fit = run_stage(PipelineStage::OutcomeModel, [&] {
    auto f = fit_cox(data, design, &weighting.final, EventFlag::Event);
    if (!f.converged) throw ConvergenceError("weighted Cox model did not converge");
    return f;
  });
  PointEstimate out;
  out.log_hr = fit.coefficients[0];
  out.hr = std::exp(out.log_hr);
  if (with_diagnostics) out.diagnostics = diagnose(weighting);
  return out;
}

}  // namespace tada
