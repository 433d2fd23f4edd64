#include "tada/weights/censoring.hpp"

#include <cmath>

#include "tada/errors.hpp"

namespace tada {

CensoringWeights fit_censoring_weights(const SurvivalDataset& data, std::span<const Selector> covariates,
                                       const CoxOptions& options) {
  if (data.censored_count() == 0) return {std::nullopt, TimeVaryingWeights::unit(data), true};

  CoxFit fit = fit_cox(data, covariates, nullptr, EventFlag::Censoring, options);
  if (!fit.converged) throw ConvergenceError("censoring model did not converge");

  const auto& grid = data.event_times();
  std::vector<double> h_left(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) h_left[j] = fit.baseline_cumhaz.left_limit(grid[j]);

  std::vector<std::size_t> lengths(data.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < data.size(); ++i) total += lengths[i] = data.at_risk_count(i);
  std::vector<double> values;
  values.reserve(total);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto z = design_row(data, covariates, i);
    double eta = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) eta += fit.coefficients[k] * z[k];
    const double risk = std::exp(eta);
    double last_h = -1.0, last_w = 1.0;
    for (std::size_t j = 0; j < lengths[i]; ++j) {
      if (h_left[j] != last_h) {
        last_h = h_left[j];
        last_w = std::exp(last_h * risk);
      }
      values.push_back(last_w);
    }
  }
  TimeVaryingWeights w(grid, std::move(lengths), std::move(values));
  return {std::move(fit), std::move(w), false};
}

}  // namespace tada
