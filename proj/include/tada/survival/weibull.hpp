#pragma once

namespace tada {

// Time T solving exp(-lambda * T^alpha * exp(eta)) = u.
double weibull_inverse_transform(double u, double lambda, double alpha, double eta);

// exp(-lambda * t^alpha * exp(eta)).
double weibull_survival(double t, double lambda, double alpha, double eta);

}  // namespace tada
