#include "tada/simulation/scenario.hpp"

#include <cmath>
#include <string>

#include "tada/errors.hpp"

namespace tada {

namespace {

void check_population(const PopulationSpec& p, const char* which) {
  const std::string w = which;
  if (!(p.p_x1 >= 0.0 && p.p_x1 <= 1.0) || !(p.p_x2 >= 0.0 && p.p_x2 <= 1.0))
    throw ValidationError(w + " population: Bernoulli probabilities must lie in [0, 1]");
  if (!std::isfinite(p.mean_x3) || !(p.sd_x3 > 0.0) || !std::isfinite(p.sd_x3))
    throw ValidationError(w + " population: X3 needs a finite mean and positive SD");
  if (p.sample == 0) throw ValidationError(w + " population: sample size must be positive");
  if (p.superpopulation < p.sample) throw ValidationError(w + " population: superpopulation smaller than sample");
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(event_shape > 0.0) || !(event_scale > 0.0)) throw ValidationError("event Weibull needs positive shape and scale");
  if (!(censor_shape > 0.0) || !(censor_scale >= 0.0))
    throw ValidationError("censoring Weibull needs positive shape and non-negative scale");
  if (!(treatment_probability > 0.0 && treatment_probability < 1.0))
    throw ValidationError("treatment probability must lie in (0, 1)");
  check_population(source, "source");
  check_population(target, "target");
}

std::array<double, 3> scenario_interactions(int id) {
  static constexpr std::array<std::array<double, 3>, kScenarioCount> rows{{
      {1.2, 0.35, 1.3},
      {0.58, 0.35, 1.3},
      {-0.9, 0.35, 1.3},
      {-0.6, 0.35, 1.3},
      {1.2, 0.2, 1.3},
      {1.2, -0.7, 1.3},
      {1.2, -0.1, 1.3},
      {1.2, 0.35, 0.45},
      {1.2, 0.35, -0.3},
      {1.2, 0.35, -0.85},
  }};
  if (id < 1 || id > kScenarioCount)
    throw ValidationError("unknown scenario " + std::to_string(id) + " (expected 1-10)");
  return rows[static_cast<std::size_t>(id - 1)];
}

ScenarioConfig ScenarioConfig::preset(int id, double censor_intercept) {
  ScenarioConfig c;
  c.id = id;
  c.interactions = scenario_interactions(id);
  c.censor_intercept = censor_intercept;
  return c;
}

double censor_intercept_for_level(int percent) {
  switch (percent) {
    case 20: return 2.5;
    case 30: return 3.3;
    case 40: return 3.7;
    case 50: return 4.3;
  }
  throw ValidationError("unsupported censoring level " + std::to_string(percent) + " (expected 20, 30, 40 or 50)");
}

std::vector<CovariateSpec> simulation_schema() {
  return {{"X1", CovariateKind::Binary}, {"X2", CovariateKind::Binary}, {"X3", CovariateKind::Continuous}};
}

}  // namespace tada
