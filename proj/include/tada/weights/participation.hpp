#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace tada {

struct ParticipationWeights {
  std::vector<double> zeta;
  std::vector<double> weights;  // exp(x_i . zeta), one per source subject
  Eigen::MatrixXd centered_design;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // max |weighted mean| of the centered columns
};

struct MomOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double divergence_bound = 50.0;  // |zeta_k| beyond this is reported as infeasible
};

/// Exponential-tilting weights from the convex objective
/// Q(zeta) = sum_i exp(x_i . zeta); at the minimum the weighted column means of
/// the centered design are zero. Solved by Newton with backtracking, starting
/// at `initial_zeta` (zero when empty).
///
/// Constant-zero columns are pinned at zeta_k = 0. Throws
/// InfeasibleMomentsError (target outside the hull of source values; the
/// offending columns are listed) or RankDeficiencyError.
ParticipationWeights solve_mom_weights(const Eigen::MatrixXd& centered, const MomOptions& options = {},
                                       std::span<const double> initial_zeta = {});

// log Q(zeta), evaluated stably.
double mom_log_objective(const Eigen::MatrixXd& centered, std::span<const double> zeta);

}  // namespace tada
