#pragma once

#include <span>
#include <string>
#include <vector>

#include "tada/survival/dataset.hpp"
#include "tada/survival/step_function.hpp"
#include "tada/survival/time_varying_weights.hpp"

namespace tada {

/// Which indicator plays the role of "event" in a Cox fit.
enum class EventFlag { Event, Censoring };

/// One column of a Cox design: the treatment indicator or a named covariate.
class Selector {
 public:
  static Selector treatment() { return Selector(true, {}); }
  static Selector covariate(std::string name) { return Selector(false, std::move(name)); }

  bool is_treatment() const noexcept { return treatment_; }
  const std::string& name() const noexcept { return name_; }
  std::string label() const { return treatment_ ? std::string(kTreatmentName) : name_; }

  bool operator==(const Selector&) const = default;

  static constexpr const char* kTreatmentName = "treatment";

 private:
  Selector(bool treatment, std::string name) : treatment_(treatment), name_(std::move(name)) {}
  bool treatment_;
  std::string name_;
};

// "treatment" maps to the treatment indicator; every other name to a covariate.
std::vector<Selector> parse_selectors(std::span<const std::string> names);

struct CoxOptions {
  int max_iterations = 50;
  double gradient_tolerance = 1e-8;
  double separation_bound = 20.0;
};

struct CoxFit {
  std::vector<double> coefficients;
  std::vector<std::string> covariate_names;
  std::vector<double> std_errors;  // model-based, from the observed information
  double loglik = 0.0;
  std::vector<double> loglik_history;  // one entry per accepted iterate, starting at zero
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // max-norm at coefficients
  StepFunction baseline_cumhaz;
};

// Design matrix row for subject i, in selector order.
std::vector<double> design_row(const SurvivalDataset& data, std::span<const Selector> design, std::size_t i);

/// Maximizes the (weighted) Breslow log partial likelihood by damped Newton
/// iteration. Time-varying weights enter through the counting-process layout:
/// subject i contributes weight w_i(t_j) to the risk set at event time t_j,
/// and an event at t_j counts with mass w_i(t_j). Weights must live on the
/// dataset's event-time grid, so they are only accepted with EventFlag::Event.
///
/// Throws SeparationError when any |coefficient| exceeds the separation bound,
/// SingularHessianError when the information matrix is not positive definite.
/// Hitting max_iterations returns a fit with converged = false.
CoxFit fit_cox(const SurvivalDataset& data, std::span<const Selector> design,
               const TimeVaryingWeights* weights = nullptr, EventFlag flag = EventFlag::Event,
               const CoxOptions& options = {});

// Breslow baseline cumulative hazard at the given coefficients; jumps only at
// times flagged by `flag`. No flagged times gives the zero function.
StepFunction breslow_cumhaz(std::span<const double> coefficients, const SurvivalDataset& data,
                            std::span<const Selector> design, const TimeVaryingWeights* weights = nullptr,
                            EventFlag flag = EventFlag::Event);

}  // namespace tada
