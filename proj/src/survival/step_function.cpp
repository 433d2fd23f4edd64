#include "tada/survival/step_function.hpp"

#include <algorithm>

#include "tada/errors.hpp"

namespace tada {

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values, double value_before_first_knot)
    : knots_(std::move(knots)), values_(std::move(values)), before_(value_before_first_knot) {
  if (knots_.size() != values_.size()) throw ValidationError("step function: knots and values differ in length");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1])) throw ValidationError("step function: knots must be strictly increasing");
}

double StepFunction::operator()(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return before_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return before_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

}  // namespace tada
