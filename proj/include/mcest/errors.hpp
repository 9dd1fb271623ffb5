#ifndef MCEST_ERRORS_HPP
#define MCEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcest {

/// Argument outside the domain of a function (non-finite input, t <= 0, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration, parameter set or input file.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base of every numerical failure. Carries the best value reached, when there is one.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, double best = 0.0)
      : std::runtime_error(what), best_(best) {}
  double best() const noexcept { return best_; }

 private:
  double best_;
};

/// Adaptive quadrature could not meet its tolerance.
class tolerance_not_met : public numerical_error {
 public:
  tolerance_not_met(const std::string& what, double best, double error_estimate)
      : numerical_error(what, best), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Bracket never showed a sign change.
class no_root : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// An iteration (root finder, series, continued fraction) ran out of budget.
class non_convergence : public numerical_error {
 public:
  non_convergence(const std::string& what, double best, int iterations)
      : numerical_error(what, best), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

}  // namespace mcest

#endif  // MCEST_ERRORS_HPP
