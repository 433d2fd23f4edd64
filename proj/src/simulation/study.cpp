#include "tada/simulation/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tada/errors.hpp"
#include "tada/estimator/bootstrap.hpp"
#include "tada/estimator/parallel.hpp"
#include "tada/estimator/rng.hpp"
#include "tada/weights/final_weights.hpp"

namespace tada {

void SimulationOptions::validate() const {
  if (replicates < 1) throw ValidationError("replicate count must be at least 1");
  if (bootstrap_B < 1) throw ValidationError("bootstrap count must be at least 1");
  if (truncation_cutoff && !(*truncation_cutoff > 0.0 && *truncation_cutoff <= 1.0))
    throw ValidationError("truncation cutoff must lie in (0, 1]");
  if (abnormal) abnormal->validate();
}

namespace {

std::uint64_t replicate_seed(const ScenarioConfig& config, std::uint64_t master, std::uint64_t r) {
  return derive_seed(master, {static_cast<std::uint64_t>(config.id), r});
}

struct CensorFractions {
  double overall = 0.0, treated = 0.0, control = 0.0;
};

CensorFractions censor_fractions(const SurvivalDataset& data) {
  std::size_t n[2] = {0, 0}, c[2] = {0, 0};
  for (const auto& r : data.records()) {
    ++n[r.treatment];
    if (!r.event) ++c[r.treatment];
  }
  auto frac = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  return {frac(c[0] + c[1], n[0] + n[1]), frac(c[1], n[1]), frac(c[0], n[0])};
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

StrategySummary summarize_strategy(const std::vector<const StrategyOutcome*>& outcomes, std::size_t valid,
                                   double truth) {
  StrategySummary s;
  s.successes = outcomes.size();
  s.failures = valid - outcomes.size();
  if (outcomes.empty()) return s;
  std::vector<double> hr, dev, lo, hi, se;
  std::size_t covered = 0;
  for (const auto* o : outcomes) {
    hr.push_back(o->hr);
    dev.push_back(o->hr - truth);
    lo.push_back(o->ci_low);
    hi.push_back(o->ci_high);
    se.push_back(o->bootstrap_se);
    if (o->ci_low <= truth && truth <= o->ci_high) ++covered;
  }
  s.mean_hr = mean_of(hr);
  s.mean_ci_low = mean_of(lo);
  s.mean_ci_high = mean_of(hi);
  s.bias = mean_of(dev);
  s.bias_low = quantile_type7(dev, 0.025);
  s.bias_high = quantile_type7(dev, 0.975);
  s.coverage = static_cast<double>(covered) / static_cast<double>(outcomes.size());
  s.monte_carlo_sd = sd_of(hr);
  s.mean_bootstrap_se = mean_of(se);
  return s;
}

}  // namespace

ScenarioSummary summarize(const ScenarioConfig& config, std::vector<ReplicateOutcome> outcomes) {
  ScenarioSummary s;
  s.scenario_id = config.id;
  s.censor_intercept = config.censor_intercept;
  s.replicates = outcomes.size();

  std::vector<double> truths, censored;
  for (const auto& o : outcomes) {
    if (!o.pseudo_true_hr) {
      ++s.failed_replicates;
      continue;
    }
    truths.push_back(*o.pseudo_true_hr);
    censored.push_back(o.censor_fraction_overall);
  }
  s.pseudo_true_hr = mean_of(truths);
  const double half = truths.empty() ? 0.0 : 1.959963984540054 * sd_of(truths) / std::sqrt(double(truths.size()));
  s.pseudo_true_low = s.pseudo_true_hr - half;
  s.pseudo_true_high = s.pseudo_true_hr + half;
  s.mean_censor_fraction = mean_of(censored);

  std::vector<const StrategyOutcome*> adjusted, ignored;
  for (const auto& o : outcomes) {
    if (!o.pseudo_true_hr) continue;
    if (o.adjusted) adjusted.push_back(&*o.adjusted);
    if (o.ignored) ignored.push_back(&*o.ignored);
  }
  s.adjusted = summarize_strategy(adjusted, truths.size(), s.pseudo_true_hr);
  s.ignored = summarize_strategy(ignored, truths.size(), s.pseudo_true_hr);
  s.outcomes = std::move(outcomes);
  return s;
}

ReplicateOutcome run_replicate(const ScenarioConfig& config, const SimulationOptions& options, std::uint64_t r) {
  ReplicateOutcome out;
  out.replicate = r;
  const std::uint64_t seed = replicate_seed(config, options.seed, r);

  std::optional<SurvivalDataset> study;
  std::optional<TargetSample> target;
  try {
    study = generate_study_ipd(config, derive_seed(seed, {1}));
    target = generate_target(config, derive_seed(seed, {2}));
    out.pseudo_true_hr = pseudo_true_hr(target->pseudo_ipd).hr;
    if (options.abnormal) target = inject_abnormal_values(target->pseudo_ipd, *options.abnormal, derive_seed(seed, {3}));
  } catch (const std::exception& e) {
    out.pseudo_true_hr.reset();
    out.adjusted_error = out.ignored_error = e.what();
    return out;
  }
  const auto fractions = censor_fractions(*study);
  out.censor_fraction_overall = fractions.overall;
  out.censor_fraction_treated = fractions.treated;
  out.censor_fraction_control = fractions.control;

  AnalysisConfig analysis;
  analysis.include_second_moments = options.include_second_moments;
  analysis.truncation_cutoff = options.truncation_cutoff;
  analysis.bootstrap_B = options.bootstrap_B;
  analysis.seed = derive_seed(seed, {4});
  analysis.workers = 1;
  analysis.max_failure_fraction = options.max_failure_fraction;

  for (auto strategy : {CensoringStrategy::Adjusted, CensoringStrategy::Ignored}) {
    analysis.strategy = strategy;
    auto& slot = strategy == CensoringStrategy::Adjusted ? out.adjusted : out.ignored;
    auto& error = strategy == CensoringStrategy::Adjusted ? out.adjusted_error : out.ignored_error;
    try {
      const TransportEstimate e = bootstrap_transport(*study, target->aggregate, analysis);
      slot = StrategyOutcome{e.hr, e.ci_low, e.ci_high, e.bootstrap_se, e.failed_draws.size()};
    } catch (const std::exception& e) {
      error = e.what();
    }
  }
  return out;
}

ScenarioSummary run_scenario(const ScenarioConfig& config, const SimulationOptions& options) {
  config.validate();
  options.validate();
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(options.replicates));
  parallel_for(outcomes.size(), options.workers,
               [&](std::size_t r) { outcomes[r] = run_replicate(config, options, r); });
  return summarize(config, std::move(outcomes));
}

Distribution describe(std::vector<double> values) {
  Distribution d;
  if (values.empty()) return d;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  d.min = *lo;
  d.max = *hi;
  d.mean = mean_of(values);
  d.q1 = quantile_type7(values, 0.25);
  d.median = quantile_type7(values, 0.5);
  d.q3 = quantile_type7(values, 0.75);
  return d;
}

std::vector<CalibrationRow> censoring_calibration_report(const std::vector<ScenarioConfig>& scenarios, int replicates,
                                                         std::uint64_t seed, unsigned workers) {
  if (replicates < 1) throw ValidationError("replicate count must be at least 1");
  std::vector<CalibrationRow> rows;
  for (const auto& config : scenarios) {
    config.validate();
    std::vector<CensorFractions> f(static_cast<std::size_t>(replicates));
    parallel_for(f.size(), workers, [&](std::size_t r) {
      f[r] = censor_fractions(generate_study_ipd(config, derive_seed(replicate_seed(config, seed, r), {1})));
    });
    std::vector<double> overall, treated, control;
    for (const auto& x : f) {
      overall.push_back(x.overall);
      treated.push_back(x.treated);
      control.push_back(x.control);
    }
    rows.push_back({config.id, config.censor_intercept, describe(overall), describe(treated), describe(control)});
  }
  return rows;
}

std::vector<double> pseudo_true_benchmarks(const ScenarioConfig& config, int replicates, std::uint64_t seed,
                                           unsigned workers) {
  if (replicates < 1) throw ValidationError("replicate count must be at least 1");
  config.validate();
  std::vector<double> hr(static_cast<std::size_t>(replicates));
  parallel_for(hr.size(), workers, [&](std::size_t r) {
    hr[r] = pseudo_true_hr(generate_target(config, derive_seed(replicate_seed(config, seed, r), {2})).pseudo_ipd).hr;
  });
  return hr;
}

std::vector<TruncationRow> sensitivity_truncation(const ScenarioConfig& config,
                                                  const std::vector<std::optional<double>>& cutoffs,
                                                  const SimulationOptions& options) {
  std::vector<TruncationRow> rows;
  for (const auto& cutoff : cutoffs) {
    SimulationOptions o = options;
    o.truncation_cutoff = cutoff;
    rows.push_back({cutoff, run_scenario(config, o)});
  }
  return rows;
}

std::vector<SampleSizeRow> sensitivity_sample_size(const ScenarioConfig& config, const std::vector<std::size_t>& sizes,
                                                   const SimulationOptions& options) {
  std::vector<SampleSizeRow> rows;
  for (auto n : sizes) {
    if (n == 0) throw ValidationError("source sample size must be positive");
    ScenarioConfig c = config;
    c.source.sample = n;
    rows.push_back({n, run_scenario(c, options)});
  }
  return rows;
}

std::vector<AbnormalRow> sensitivity_abnormal(const ScenarioConfig& config, const std::vector<int>& types,
                                              const SimulationOptions& options) {
  std::vector<AbnormalRow> rows;
  for (int type : types) {
    SimulationOptions o = options;
    o.abnormal = AbnormalValueSpec::preset(type);
    rows.push_back({type, *o.abnormal, run_scenario(config, o)});
  }
  return rows;
}

}  // namespace tada
