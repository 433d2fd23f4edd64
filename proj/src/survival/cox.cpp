#include "tada/survival/cox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

#include "tada/errors.hpp"

namespace tada {

std::vector<Selector> parse_selectors(std::span<const std::string> names) {
  std::vector<Selector> out;
  out.reserve(names.size());
  for (const auto& n : names)
    out.push_back(n == Selector::kTreatmentName ? Selector::treatment() : Selector::covariate(n));
  return out;
}

std::vector<double> design_row(const SurvivalDataset& data, std::span<const Selector> design, std::size_t i) {
  std::vector<double> row;
  row.reserve(design.size());
  const auto& r = data[i];
  for (const auto& s : design)
    row.push_back(s.is_treatment() ? (r.treatment ? 1.0 : 0.0) : r.covariates[data.covariate_index(s.name())]);
  return row;
}

namespace {

bool is_flagged(const SubjectRecord& r, EventFlag flag) {
  return flag == EventFlag::Event ? r.event : !r.event;
}

Eigen::MatrixXd build_design(const SurvivalDataset& data, std::span<const Selector> design) {
  std::vector<std::ptrdiff_t> column(design.size(), -1);
  for (std::size_t k = 0; k < design.size(); ++k)
    if (!design[k].is_treatment()) column[k] = static_cast<std::ptrdiff_t>(data.covariate_index(design[k].name()));

  Eigen::MatrixXd z(data.size(), design.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    for (std::size_t k = 0; k < design.size(); ++k)
      z(i, k) = column[k] < 0 ? (r.treatment ? 1.0 : 0.0) : r.covariates[static_cast<std::size_t>(column[k])];
  }
  return z;
}

struct Derivatives {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

class CoxObjective {
 public:
  virtual ~CoxObjective() = default;
  virtual Derivatives evaluate(const Eigen::VectorXd& beta, bool with_hessian) const = 0;
  virtual StepFunction cumulative_hazard(const Eigen::VectorXd& beta) const = 0;
};

// Weights constant in time (including unit weights): risk-set sums accumulate
// in one pass over subjects sorted by decreasing time.
class ConstantWeightObjective final : public CoxObjective {
 public:
  ConstantWeightObjective(Eigen::MatrixXd z, std::vector<double> times, std::vector<char> flagged,
                          std::vector<double> weights)
      : z_(std::move(z)), times_(std::move(times)), flagged_(std::move(flagged)), w_(std::move(weights)) {
    order_.resize(times_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return times_[a] > times_[b]; });
  }

  Derivatives evaluate(const Eigen::VectorXd& beta, bool with_hessian) const override {
    const auto p = z_.cols();
    const Eigen::VectorXd eta = z_ * beta;
    const double shift = eta.size() ? eta.maxCoeff() : 0.0;

    Derivatives out;
    out.gradient = Eigen::VectorXd::Zero(p);
    if (with_hessian) out.hessian = Eigen::MatrixXd::Zero(p, p);

    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd event_z(p);

    const std::size_t n = order_.size();
    std::size_t k = 0;
    while (k < n) {
      const double t = times_[order_[k]];
      double d = 0.0, weighted_eta = 0.0;
      event_z.setZero();
      for (; k < n && times_[order_[k]] == t; ++k) {
        const std::size_t i = order_[k];
        const double e = w_[i] * std::exp(eta[i] - shift);
        s0 += e;
        s1.noalias() += e * z_.row(i).transpose();
        if (with_hessian) s2.noalias() += e * z_.row(i).transpose() * z_.row(i);
        if (flagged_[i]) {
          d += w_[i];
          weighted_eta += w_[i] * eta[i];
          event_z.noalias() += w_[i] * z_.row(i).transpose();
        }
      }
      if (d > 0.0) {
        const Eigen::VectorXd mean = s1 / s0;
        out.loglik += weighted_eta - d * (std::log(s0) + shift);
        out.gradient.noalias() += event_z - d * mean;
        if (with_hessian) out.hessian.noalias() -= d * (s2 / s0 - mean * mean.transpose());
      }
    }
    return out;
  }

  StepFunction cumulative_hazard(const Eigen::VectorXd& beta) const override {
    const Eigen::VectorXd eta = z_ * beta;
    std::vector<double> knots, jumps;
    double s0 = 0.0;
    const std::size_t n = order_.size();
    std::size_t k = 0;
    while (k < n) {
      const double t = times_[order_[k]];
      double d = 0.0;
      for (; k < n && times_[order_[k]] == t; ++k) {
        const std::size_t i = order_[k];
        s0 += w_[i] * std::exp(eta[i]);
        if (flagged_[i]) d += w_[i];
      }
      if (d > 0.0) {
        knots.push_back(t);
        jumps.push_back(d / s0);
      }
    }
    std::reverse(knots.begin(), knots.end());
    std::reverse(jumps.begin(), jumps.end());
    std::partial_sum(jumps.begin(), jumps.end(), jumps.begin());
    return StepFunction(std::move(knots), std::move(jumps), 0.0);
  }

 private:
  Eigen::MatrixXd z_;
  std::vector<double> times_;
  std::vector<char> flagged_;
  std::vector<double> w_;
  std::vector<std::size_t> order_;
};

// Time-varying weights: subjects sharing a design row are pooled into one
// pattern, and at-risk / event masses are aggregated per (event time, pattern).
class TimeVaryingObjective final : public CoxObjective {
 public:
  TimeVaryingObjective(const Eigen::MatrixXd& z, const std::vector<char>& flagged, const TimeVaryingWeights& w)
      : grid_(w.grid()) {
    const auto n = static_cast<std::size_t>(z.rows());
    const auto p = z.cols();
    std::map<std::vector<double>, std::size_t> index;
    std::vector<std::size_t> pattern_of(n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> key(static_cast<std::size_t>(p));
      for (Eigen::Index c = 0; c < p; ++c) key[static_cast<std::size_t>(c)] = z(i, c);
      auto [it, inserted] = index.emplace(key, rows.size());
      if (inserted) rows.push_back(key);
      pattern_of[i] = it->second;
    }
    patterns_ = rows.size();
    pz_.resize(static_cast<Eigen::Index>(patterns_), p);
    for (std::size_t g = 0; g < patterns_; ++g)
      for (Eigen::Index c = 0; c < p; ++c) pz_(static_cast<Eigen::Index>(g), c) = rows[g][static_cast<std::size_t>(c)];

    const std::size_t J = grid_.size();
    at_risk_.assign(J * patterns_, 0.0);
    events_.assign(J * patterns_, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = w.row(i);
      const std::size_t g = pattern_of[i];
      for (std::size_t j = 0; j < row.size(); ++j) at_risk_[j * patterns_ + g] += row[j];
      if (flagged[i] && !row.empty()) events_[(row.size() - 1) * patterns_ + g] += row.back();
    }
  }

  Derivatives evaluate(const Eigen::VectorXd& beta, bool with_hessian) const override {
    const auto p = pz_.cols();
    const Eigen::VectorXd eta = pz_ * beta;
    const double shift = eta.size() ? eta.maxCoeff() : 0.0;
    Eigen::VectorXd e(eta.size());
    for (Eigen::Index g = 0; g < eta.size(); ++g) e[g] = std::exp(eta[g] - shift);

    Derivatives out;
    out.gradient = Eigen::VectorXd::Zero(p);
    if (with_hessian) out.hessian = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd s1(p), event_z(p);
    Eigen::MatrixXd s2(p, p);

    for (std::size_t j = 0; j < grid_.size(); ++j) {
      double s0 = 0.0, d = 0.0, weighted_eta = 0.0;
      s1.setZero();
      event_z.setZero();
      if (with_hessian) s2.setZero();
      for (std::size_t g = 0; g < patterns_; ++g) {
        const double m = at_risk_[j * patterns_ + g];
        if (m == 0.0) continue;
        const auto gi = static_cast<Eigen::Index>(g);
        const double mass = m * e[gi];
        s0 += mass;
        s1.noalias() += mass * pz_.row(gi).transpose();
        if (with_hessian) s2.noalias() += mass * pz_.row(gi).transpose() * pz_.row(gi);
        const double dm = events_[j * patterns_ + g];
        if (dm > 0.0) {
          d += dm;
          weighted_eta += dm * eta[gi];
          event_z.noalias() += dm * pz_.row(gi).transpose();
        }
      }
      if (d > 0.0) {
        const Eigen::VectorXd mean = s1 / s0;
        out.loglik += weighted_eta - d * (std::log(s0) + shift);
        out.gradient.noalias() += event_z - d * mean;
        if (with_hessian) out.hessian.noalias() -= d * (s2 / s0 - mean * mean.transpose());
      }
    }
    return out;
  }

  StepFunction cumulative_hazard(const Eigen::VectorXd& beta) const override {
    const Eigen::VectorXd eta = pz_ * beta;
    std::vector<double> knots, values;
    double total = 0.0;
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      double s0 = 0.0, d = 0.0;
      for (std::size_t g = 0; g < patterns_; ++g) {
        s0 += at_risk_[j * patterns_ + g] * std::exp(eta[static_cast<Eigen::Index>(g)]);
        d += events_[j * patterns_ + g];
      }
      if (d > 0.0) {
        total += d / s0;
        knots.push_back(grid_[j]);
        values.push_back(total);
      }
    }
    return StepFunction(std::move(knots), std::move(values), 0.0);
  }

 private:
  std::vector<double> grid_;
  std::size_t patterns_ = 0;
  Eigen::MatrixXd pz_;
  std::vector<double> at_risk_;  // grid-major, patterns_ per row
  std::vector<double> events_;
};

std::unique_ptr<CoxObjective> make_objective(const SurvivalDataset& data, std::span<const Selector> design,
                                             const TimeVaryingWeights* weights, EventFlag flag) {
  Eigen::MatrixXd z = build_design(data, design);
  std::vector<double> times(data.size());
  std::vector<char> flagged(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    times[i] = data[i].observed_time;
    flagged[i] = is_flagged(data[i], flag) ? 1 : 0;
  }

  if (weights == nullptr)
    return std::make_unique<ConstantWeightObjective>(std::move(z), std::move(times), std::move(flagged),
                                                     std::vector<double>(data.size(), 1.0));

  if (flag != EventFlag::Event)
    throw ValidationError("fit_cox: time-varying weights live on the event-time grid; use EventFlag::Event");
  if (!weights->matches(data))
    throw ValidationError("fit_cox: weights do not match the dataset's event-time grid and risk sets");

  if (weights->all_rows_constant()) {
    std::vector<double> w(data.size(), 1.0);
    for (std::size_t i = 0; i < data.size(); ++i)
      if (weights->row_length(i) > 0) w[i] = weights->row(i)[0];
    return std::make_unique<ConstantWeightObjective>(std::move(z), std::move(times), std::move(flagged), std::move(w));
  }
  return std::make_unique<TimeVaryingObjective>(z, flagged, *weights);
}

void check_design(const SurvivalDataset& data, std::span<const Selector> design) {
  for (const auto& s : design)
    if (!s.is_treatment()) (void)data.covariate_index(s.name());
}

std::size_t flagged_count(const SurvivalDataset& data, EventFlag flag) {
  return flag == EventFlag::Event ? data.event_count() : data.censored_count();
}

}  // namespace

CoxFit fit_cox(const SurvivalDataset& data, std::span<const Selector> design, const TimeVaryingWeights* weights,
               EventFlag flag, const CoxOptions& options) {
  check_design(data, design);
  if (flagged_count(data, flag) == 0)
    throw ValidationError(flag == EventFlag::Event ? "fit_cox: no events" : "fit_cox: no censored observations");

  const auto objective = make_objective(data, design, weights, flag);
  const auto p = static_cast<Eigen::Index>(design.size());

  CoxFit fit;
  for (const auto& s : design) fit.covariate_names.push_back(s.label());

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Derivatives cur = objective->evaluate(beta, true);
  if (p == 0) {
    fit.loglik = cur.loglik;
    fit.loglik_history = {cur.loglik};
    fit.converged = true;
    fit.baseline_cumhaz = objective->cumulative_hazard(beta);
    return fit;
  }

  auto factor = [&](const Eigen::MatrixXd& hessian) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-hessian);
    const double scale = std::max(1.0, hessian.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale || !ldlt.vectorD().allFinite())
      throw SingularHessianError("fit_cox: information matrix is singular (collinear or constant design columns)");
    return ldlt;
  };

  auto separation_check = [&](const Eigen::VectorXd& b) {
    std::vector<std::string> terms;
    for (Eigen::Index k = 0; k < p; ++k)
      if (std::abs(b[k]) > options.separation_bound) terms.push_back(fit.covariate_names[static_cast<std::size_t>(k)]);
    if (!terms.empty()) {
      std::string list;
      for (const auto& t : terms) list += (list.empty() ? "" : ", ") + t;
      throw SeparationError("fit_cox: monotone likelihood, coefficient diverges for: " + list, terms);
    }
  };

  std::vector<double> history{cur.loglik};
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const auto ldlt = factor(cur.hessian);
    const Eigen::VectorXd step = ldlt.solve(cur.gradient);
    const double gnorm = cur.gradient.cwiseAbs().maxCoeff();
    // A tiny gradient alone is not enough: on a monotone likelihood the gradient
    // vanishes while Newton steps stay of order one.
    if (gnorm < options.gradient_tolerance &&
        step.cwiseAbs().maxCoeff() < 1e-6 * (1.0 + beta.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }

    // Near the optimum the log-likelihood changes by less than its own rounding
    // error, so a step is accepted when it loses no more than that.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cur.loglik));
    double scale = 1.0;
    Eigen::VectorXd candidate;
    Derivatives next;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      candidate = beta + scale * step;
      next = objective->evaluate(candidate, true);
      if (std::isfinite(next.loglik) && next.loglik >= cur.loglik - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    beta = candidate;
    cur = std::move(next);
    history.push_back(cur.loglik);
    separation_check(beta);
  }

  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.loglik = cur.loglik;
  fit.loglik_history = std::move(history);
  fit.converged = converged;
  fit.iterations = iter;
  fit.gradient_norm = p ? cur.gradient.cwiseAbs().maxCoeff() : 0.0;
  {
    const auto ldlt = factor(cur.hessian);
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index k = 0; k < p; ++k) fit.std_errors.push_back(std::sqrt(cov(k, k)));
  }
  fit.baseline_cumhaz = objective->cumulative_hazard(beta);
  return fit;
}

StepFunction breslow_cumhaz(std::span<const double> coefficients, const SurvivalDataset& data,
                            std::span<const Selector> design, const TimeVaryingWeights* weights, EventFlag flag) {
  check_design(data, design);
  if (coefficients.size() != design.size())
    throw ValidationError("breslow_cumhaz: coefficient count does not match the design");
  if (flagged_count(data, flag) == 0) return StepFunction();
  const auto objective = make_objective(data, design, weights, flag);
  Eigen::VectorXd beta(static_cast<Eigen::Index>(coefficients.size()));
  for (std::size_t k = 0; k < coefficients.size(); ++k) beta[static_cast<Eigen::Index>(k)] = coefficients[k];
  return objective->cumulative_hazard(beta);
}

}  // namespace tada
