#include "tada/survival/weibull.hpp"

#include <cmath>
#include <stdexcept>

namespace tada {

double weibull_inverse_transform(double u, double lambda, double alpha, double eta) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("weibull_inverse_transform: u must lie in (0, 1)");
  if (!(lambda > 0.0)) throw std::domain_error("weibull_inverse_transform: lambda must be positive");
  if (!(alpha > 0.0)) throw std::domain_error("weibull_inverse_transform: alpha must be positive");
  return std::pow(-std::log(u) / (lambda * std::exp(eta)), 1.0 / alpha);
}

double weibull_survival(double t, double lambda, double alpha, double eta) {
  return std::exp(-lambda * std::pow(t, alpha) * std::exp(eta));
}

}  // namespace tada
