#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tada/estimator/pipeline.hpp"

namespace tada {

class BootstrapError : public std::runtime_error {
 public:
  BootstrapError(const std::string& what, std::size_t failed, std::size_t attempted)
      : std::runtime_error(what), failed_(failed), attempted_(attempted) {}
  std::size_t failed() const noexcept { return failed_; }
  std::size_t attempted() const noexcept { return attempted_; }

 private:
  std::size_t failed_;
  std::size_t attempted_;
};

struct TransportEstimate {
  double log_hr = 0.0;
  double hr = 1.0;
  double ci_low = 1.0;  // percentile bootstrap, HR scale
  double ci_high = 1.0;
  double bootstrap_se = 0.0;                 // SD of the successful HR draws
  std::vector<double> bootstrap_draws;       // successful draws, in draw order
  std::vector<std::size_t> failed_draws;     // indices of draws whose pipeline failed
  WeightDiagnostics diagnostics;
};

// Subject indices for bootstrap draw b: n uniform picks with replacement
// from the stream (seed, b).
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed, std::uint64_t b);

/// Point estimate plus B nonparametric bootstrap resamples of the source
/// subjects; every resample reruns the full weighting pipeline against the
/// fixed target aggregate. Failed draws are dropped and counted; more than
/// max_failure_fraction of B failing throws BootstrapError.
TransportEstimate bootstrap_transport(const SurvivalDataset& data, const TargetAggregate& target,
                                      const AnalysisConfig& config);

}  // namespace tada
