#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tada/survival/dataset.hpp"

namespace tada {

// Covariate distributions of a simulated population: X1 ~ Bern(p_x1),
// X2 ~ Bern(p_x2), X3 ~ N(mean_x3, sd_x3^2).
struct PopulationSpec {
  double p_x1 = 0.5;
  double p_x2 = 0.5;
  double mean_x3 = 0.0;
  double sd_x3 = 1.0;
  std::size_t superpopulation = 0;
  std::size_t sample = 0;
};

/// Weibull proportional-hazards data-generating mechanism.
///   event:  eta = b . X + b_trt A + A (g . X),   hazard lambda alpha t^(alpha-1) e^eta
///   censor: eta = b0 + c . X + c_trt A
/// censor_scale == 0 switches censoring off.
struct ScenarioConfig {
  int id = 1;
  std::array<double, 3> main_effects{0.5, -0.3, 0.2};
  double treatment_effect = -0.4;
  std::array<double, 3> interactions{1.2, 0.35, 1.3};
  double event_shape = 1.5;
  double event_scale = 0.1;
  double censor_shape = 1.5;
  double censor_scale = 0.001;
  double censor_intercept = 2.5;
  std::array<double, 3> censor_effects{-0.2, 0.4, -0.1};
  double censor_treatment_effect = 0.25;
  PopulationSpec source{0.45, 0.65, 0.0, 1.0, 50000, 200};
  PopulationSpec target{0.35, 0.55, 0.21, 1.5, 200000, 1000};
  double treatment_probability = 0.5;

  void validate() const;  // throws ValidationError

  // One of the ten interaction settings, at the given censoring intercept.
  static ScenarioConfig preset(int id, double censor_intercept = 2.5);
};

constexpr int kScenarioCount = 10;

// Interaction triple (A*X1, A*X2, A*X3) of scenario 1..10; ValidationError otherwise.
std::array<double, 3> scenario_interactions(int id);

// Censoring intercept for the 20/30/40/50 percent censoring levels.
double censor_intercept_for_level(int percent);

// X1 binary, X2 binary, X3 continuous.
std::vector<CovariateSpec> simulation_schema();

}  // namespace tada
