#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tada {

// Invalid input data or configuration (schema violations, bad flags, bad files).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cox likelihood is monotone in at least one coefficient (complete or quasi-complete separation).
class SeparationError : public std::runtime_error {
 public:
  SeparationError(const std::string& what, std::vector<std::string> terms)
      : std::runtime_error(what), terms_(std::move(terms)) {}
  const std::vector<std::string>& terms() const noexcept { return terms_; }

 private:
  std::vector<std::string> terms_;
};

class SingularHessianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target moments lie outside the convex hull of the source balance-function values.
class InfeasibleMomentsError : public std::runtime_error {
 public:
  InfeasibleMomentsError(const std::string& what, std::vector<std::size_t> components)
      : std::runtime_error(what), components_(std::move(components)) {}
  const std::vector<std::size_t>& components() const noexcept { return components_; }

 private:
  std::vector<std::size_t> components_;
};

class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tada
