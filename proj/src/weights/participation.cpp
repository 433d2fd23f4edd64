#include "tada/weights/participation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "tada/errors.hpp"

namespace tada {

namespace {

struct TiltState {
  double log_q = 0.0;
  Eigen::VectorXd gradient;  // weighted column means
  Eigen::MatrixXd hessian;   // weighted second moments
  Eigen::VectorXd weights;   // exp(x_i . zeta - shift)
};

TiltState tilt(const Eigen::MatrixXd& x, const Eigen::VectorXd& zeta) {
  TiltState s;
  const Eigen::VectorXd a = x * zeta;
  const double shift = a.maxCoeff();
  s.weights = (a.array() - shift).exp();
  const double total = s.weights.sum();
  s.log_q = shift + std::log(total);
  s.gradient = x.transpose() * s.weights / total;
  s.hessian = x.transpose() * s.weights.asDiagonal() * x / total;
  return s;
}

std::string list_components(const std::vector<std::size_t>& ks) {
  std::string out;
  for (auto k : ks) out += (out.empty() ? "" : ", ") + std::to_string(k);
  return out;
}

}  // namespace

double mom_log_objective(const Eigen::MatrixXd& centered, std::span<const double> zeta) {
  Eigen::VectorXd z(centered.cols());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = zeta[static_cast<std::size_t>(k)];
  const Eigen::VectorXd a = centered * z;
  const double shift = a.maxCoeff();
  return shift + std::log((a.array() - shift).exp().sum());
}

ParticipationWeights solve_mom_weights(const Eigen::MatrixXd& centered, const MomOptions& options,
                                       std::span<const double> initial_zeta) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index K = centered.cols();
  if (n == 0) throw ValidationError("solve_mom_weights: no source subjects");
  if (!initial_zeta.empty() && initial_zeta.size() != static_cast<std::size_t>(K))
    throw ValidationError("solve_mom_weights: initial zeta has the wrong length");

  std::vector<Eigen::Index> active;
  std::vector<std::size_t> one_sided;
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto col = centered.col(k);
    if ((col.array() == 0.0).all()) continue;
    active.push_back(k);
    if ((col.array() >= 0.0).all() || (col.array() <= 0.0).all()) one_sided.push_back(static_cast<std::size_t>(k));
  }
  if (!one_sided.empty())
    throw InfeasibleMomentsError(
        "target moment lies on or outside the range of source values for balance function(s) " +
            list_components(one_sided),
        one_sided);

  ParticipationWeights out;
  out.centered_design = centered;
  out.zeta.assign(static_cast<std::size_t>(K), 0.0);

  const auto Ka = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd x(n, Ka);
  for (Eigen::Index a = 0; a < Ka; ++a) x.col(a) = centered.col(active[static_cast<std::size_t>(a)]);

  if (Ka > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < Ka) throw RankDeficiencyError("solve_mom_weights: balance functions are linearly dependent");
  }

  Eigen::VectorXd zeta = Eigen::VectorXd::Zero(Ka);
  if (!initial_zeta.empty())
    for (Eigen::Index a = 0; a < Ka; ++a) zeta[a] = initial_zeta[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];

  TiltState state = tilt(x, zeta);
  int iter = 0;
  bool converged = Ka == 0;
  for (; !converged && iter < options.max_iterations; ++iter) {
    if (state.gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(state.hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw RankDeficiencyError("solve_mom_weights: singular Hessian");
    const Eigen::VectorXd step = -ldlt.solve(state.gradient);
    const double slope = state.gradient.dot(step);

    double t = 1.0;
    TiltState next;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      next = tilt(x, zeta + t * step);
      if (next.log_q <= state.log_q + 1e-4 * t * slope) break;
    }
    zeta += t * step;
    state = std::move(next);

    std::vector<std::size_t> diverging;
    for (Eigen::Index a = 0; a < Ka; ++a)
      if (std::abs(zeta[a]) > options.divergence_bound)
        diverging.push_back(static_cast<std::size_t>(active[static_cast<std::size_t>(a)]));
    if (!diverging.empty())
      throw InfeasibleMomentsError(
          "target moments lie outside the convex hull of source values; tilting diverges for balance function(s) " +
              list_components(diverging),
          diverging);
  }
  if (!converged && state.gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) converged = true;

  for (Eigen::Index a = 0; a < Ka; ++a) out.zeta[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])] = zeta[a];
  out.converged = converged;
  out.iterations = iter;
  out.gradient_norm = Ka ? state.gradient.cwiseAbs().maxCoeff() : 0.0;

  Eigen::VectorXd full(K);
  for (Eigen::Index k = 0; k < K; ++k) full[k] = out.zeta[static_cast<std::size_t>(k)];
  const Eigen::VectorXd lin = centered * full;
  out.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.weights[static_cast<std::size_t>(i)] = std::exp(lin[i]);
  return out;
}

}  // namespace tada
