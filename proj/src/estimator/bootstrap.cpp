#include "tada/estimator/bootstrap.hpp"

#include <cmath>
#include <optional>

#include "tada/estimator/parallel.hpp"
#include "tada/estimator/rng.hpp"
#include "tada/weights/final_weights.hpp"

namespace tada {

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed, std::uint64_t b) {
  Rng rng = Rng::stream(seed, {b});
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.index(n));
  return idx;
}

TransportEstimate bootstrap_transport(const SurvivalDataset& data, const TargetAggregate& target,
                                      const AnalysisConfig& config) {
  config.validate();
  if (config.bootstrap_B < 1) throw std::invalid_argument("bootstrap_transport: bootstrap_B must be at least 1");

  const PointEstimate point = tada_point_estimate(data, target, config);

  const auto B = static_cast<std::size_t>(config.bootstrap_B);
  std::vector<std::optional<double>> draws(B);
  parallel_for(B, config.workers, [&](std::size_t b) {
    try {
      const SurvivalDataset resampled = data.resample(bootstrap_indices(data.size(), config.seed, b));
      draws[b] = tada_point_estimate(resampled, target, config, false).hr;
    } catch (const std::exception&) {
      draws[b].reset();
    }
  });

  TransportEstimate out;
  out.log_hr = point.log_hr;
  out.hr = point.hr;
  out.diagnostics = point.diagnostics;
  for (std::size_t b = 0; b < B; ++b) {
    if (draws[b]) {
      out.bootstrap_draws.push_back(*draws[b]);
    } else {
      out.failed_draws.push_back(b);
    }
  }
  if (static_cast<double>(out.failed_draws.size()) > config.max_failure_fraction * static_cast<double>(B) ||
      out.bootstrap_draws.empty())
    throw BootstrapError(std::to_string(out.failed_draws.size()) + " of " + std::to_string(B) +
                             " bootstrap resamples failed",
                         out.failed_draws.size(), B);

  out.ci_low = quantile_type7(out.bootstrap_draws, 0.025);
  out.ci_high = quantile_type7(out.bootstrap_draws, 0.975);
  const double m = static_cast<double>(out.bootstrap_draws.size());
  if (m > 1) {
    double mean = 0.0;
    for (double d : out.bootstrap_draws) mean += d;
    mean /= m;
    double ss = 0.0;
    for (double d : out.bootstrap_draws) ss += (d - mean) * (d - mean);
    out.bootstrap_se = std::sqrt(ss / (m - 1.0));
  }
  return out;
}

}  // namespace tada
