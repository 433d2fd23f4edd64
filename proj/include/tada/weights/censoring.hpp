#pragma once

#include <optional>
#include <span>

#include "tada/survival/cox.hpp"
#include "tada/survival/dataset.hpp"
#include "tada/survival/time_varying_weights.hpp"

namespace tada {

struct CensoringWeights {
  std::optional<CoxFit> model;  // absent when the data has no censored records
  TimeVaryingWeights weights;
  bool no_censoring = false;
};

/// Inverse probability of censoring weights on the event-time grid.
/// A Cox model for the censoring hazard is fitted on `covariates`; subject i
/// at grid time t gets 1 / S_c(t- | A_i, X_i) = exp(H_c0(t-) * exp(eta_i)).
/// The left limit keeps a subject's own censoring jump out of its weight.
///
/// Data without censored records yields unit weights and no_censoring = true.
/// A censoring model that fails to converge throws ConvergenceError.
CensoringWeights fit_censoring_weights(const SurvivalDataset& data, std::span<const Selector> covariates,
                                       const CoxOptions& options = {});

}  // namespace tada
