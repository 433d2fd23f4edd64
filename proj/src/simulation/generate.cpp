#include "tada/simulation/generate.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tada/errors.hpp"
#include "tada/estimator/rng.hpp"
#include "tada/survival/cox.hpp"
#include "tada/survival/weibull.hpp"

namespace tada {

namespace {

struct Subject {
  double x1, x2, x3;
  bool treated;
};

// Covariates and treatment for the whole superpopulation, then a uniform
// subsample without replacement (partial Fisher-Yates).
std::vector<Subject> draw_sample(const PopulationSpec& pop, double treatment_probability, Rng& rng) {
  std::vector<Subject> superpop(pop.superpopulation);
  for (auto& s : superpop) {
    s.x1 = rng.bernoulli(pop.p_x1) ? 1.0 : 0.0;
    s.x2 = rng.bernoulli(pop.p_x2) ? 1.0 : 0.0;
    s.x3 = rng.normal(pop.mean_x3, pop.sd_x3);
    s.treated = rng.bernoulli(treatment_probability);
  }
  std::vector<std::size_t> idx(superpop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Subject> out;
  out.reserve(pop.sample);
  for (std::size_t k = 0; k < pop.sample; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.index(idx.size() - k));
    std::swap(idx[k], idx[j]);
    out.push_back(superpop[idx[k]]);
  }
  return out;
}

double event_eta(const ScenarioConfig& c, const Subject& s) {
  const double a = s.treated ? 1.0 : 0.0;
  return c.main_effects[0] * s.x1 + c.main_effects[1] * s.x2 + c.main_effects[2] * s.x3 + c.treatment_effect * a +
         a * (c.interactions[0] * s.x1 + c.interactions[1] * s.x2 + c.interactions[2] * s.x3);
}

double censor_eta(const ScenarioConfig& c, const Subject& s) {
  return c.censor_intercept + c.censor_effects[0] * s.x1 + c.censor_effects[1] * s.x2 + c.censor_effects[2] * s.x3 +
         c.censor_treatment_effect * (s.treated ? 1.0 : 0.0);
}

}  // namespace

SurvivalDataset generate_study_ipd(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Rng covariates(derive_seed(seed, {1}));
  Rng times(derive_seed(seed, {2}));
  const auto sample = draw_sample(config.source, config.treatment_probability, covariates);
  std::vector<SubjectRecord> records;
  records.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& s = sample[i];
    const double t = weibull_inverse_transform(times.uniform_open(), config.event_scale, config.event_shape,
                                               event_eta(config, s));
    const double u = times.uniform_open();
    const double c = config.censor_scale > 0.0
                         ? weibull_inverse_transform(u, config.censor_scale, config.censor_shape, censor_eta(config, s))
                         : std::numeric_limits<double>::infinity();
    records.push_back({"S" + std::to_string(i + 1), std::min(t, c), t <= c, s.treated, {s.x1, s.x2, s.x3}});
  }
  return SurvivalDataset(simulation_schema(), std::move(records));
}

TargetSample generate_target(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Rng covariates(derive_seed(seed, {1}));
  Rng times(derive_seed(seed, {2}));
  const auto sample = draw_sample(config.target, config.treatment_probability, covariates);
  std::vector<SubjectRecord> records;
  records.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& s = sample[i];
    const double t = weibull_inverse_transform(times.uniform_open(), config.event_scale, config.event_shape,
                                               event_eta(config, s));
    records.push_back({"T" + std::to_string(i + 1), t, true, s.treated, {s.x1, s.x2, s.x3}});
  }
  SurvivalDataset pseudo(simulation_schema(), std::move(records));
  TargetAggregate aggregate = aggregate_covariates(pseudo, pseudo.size());
  return {std::move(aggregate), std::move(pseudo)};
}

HazardRatio pseudo_true_hr(const SurvivalDataset& pseudo_ipd) {
  const Selector design[] = {Selector::treatment()};
  const CoxFit fit = fit_cox(pseudo_ipd, design);
  if (!fit.converged) throw ConvergenceError("pseudo-true Cox fit did not converge");
  const double b = fit.coefficients[0], se = fit.std_errors[0];
  return {std::exp(b), std::exp(b - 1.959963984540054 * se), std::exp(b + 1.959963984540054 * se)};
}

void AbnormalValueSpec::validate() const {
  if (!(flip_fraction_x2 >= 0.0 && flip_fraction_x2 <= 1.0) ||
      !(extreme_fraction_x3 >= 0.0 && extreme_fraction_x3 <= 1.0))
    throw ValidationError("abnormal-value fractions must lie in [0, 1]");
  if (!(extreme_multiplier > 0.0) || !std::isfinite(extreme_multiplier))
    throw ValidationError("extreme multiplier must be positive");
}

AbnormalValueSpec AbnormalValueSpec::preset(int type) {
  switch (type) {
    case 1: return {0.0, 0.0, 3.0};
    case 2: return {0.01, 0.0, 3.0};
    case 3: return {0.05, 0.0, 3.0};
    case 4: return {0.0, 0.01, 3.0};
    case 5: return {0.0, 0.05, 3.0};
    case 6: return {0.01, 0.01, 3.0};
    case 7: return {0.05, 0.05, 3.0};
  }
  throw ValidationError("unknown abnormal-value type " + std::to_string(type) + " (expected 1-7)");
}

namespace {

std::vector<std::size_t> choose(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.index(n - i))]);
  idx.resize(k);
  return idx;
}

}  // namespace

TargetSample inject_abnormal_values(const SurvivalDataset& pseudo_ipd, const AbnormalValueSpec& spec,
                                    std::uint64_t seed) {
  spec.validate();
  const std::size_t x2 = pseudo_ipd.covariate_index("X2");
  const std::size_t x3 = pseudo_ipd.covariate_index("X3");
  const std::size_t n = pseudo_ipd.size();
  std::vector<SubjectRecord> records = pseudo_ipd.records();

  Rng rng(seed);
  const auto flips = static_cast<std::size_t>(std::floor(spec.flip_fraction_x2 * static_cast<double>(n)));
  for (auto i : choose(n, flips, rng)) records[i].covariates[x2] = 1.0 - records[i].covariates[x2];

  const auto shifts = static_cast<std::size_t>(std::floor(spec.extreme_fraction_x3 * static_cast<double>(n)));
  if (shifts > 0) {
    double mean = 0.0;
    for (const auto& r : records) mean += r.covariates[x3];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& r : records) ss += (r.covariates[x3] - mean) * (r.covariates[x3] - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    for (auto i : choose(n, shifts, rng)) records[i].covariates[x3] += spec.extreme_multiplier * sd;
  }

  SurvivalDataset contaminated(pseudo_ipd.schema(), std::move(records));
  TargetAggregate aggregate = aggregate_covariates(contaminated, contaminated.size());
  return {std::move(aggregate), std::move(contaminated)};
}

}  // namespace tada
