#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mycelogic/rcnet.hpp"

namespace mycelogic {

// n = coefficient * x^exponent, fitted in log-log space.
struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double rms_log_residual = 0.0;
  std::size_t points = 0;

  double operator()(double x) const;
};

// Least squares of log(n) on log(x) over points with n > 0 (and x > 0).
// Throws InsufficientDataError with fewer than 3 such points.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> n);

// y = c0 + c1 x + c2 x^2 (coefficients.size() == degree + 1).
struct PolyFit {
  std::vector<double> coefficients;
  double rms_residual = 0.0;

  double operator()(double x) const;
  // Stationary point of a degree-2 fit; nullopt for lower degree or c2 == 0.
  std::optional<double> vertex() const;
};

// Ordinary least squares, degree 0..2. Throws ConfigError for other degrees
// and InsufficientDataError with fewer than degree + 1 points.
PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree);

// Per gate class: power law (or null), linear and quadratic fits of count
// against theta.
std::string fit_report_json(const SweepResult& sweep, std::string_view mode);

}  // namespace mycelogic
