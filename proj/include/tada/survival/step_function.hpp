#pragma once

#include <vector>

namespace tada {

/// Right-continuous step function with left limits.
class StepFunction {
 public:
  StepFunction() = default;  // identically zero
  StepFunction(std::vector<double> knots, std::vector<double> values,
               double value_before_first_knot = 0.0);

  // Value at the largest knot <= t.
  double operator()(double t) const;
  double left_limit(double t) const;

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value_before_first_knot() const noexcept { return before_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double before_ = 0.0;
};

}  // namespace tada
