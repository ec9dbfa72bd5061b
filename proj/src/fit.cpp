#include "mycelogic/fit.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "json.hpp"

#include "mycelogic/error.hpp"

namespace mycelogic {

double PowerLawFit::operator()(double x) const { return coefficient * std::pow(x, exponent); }

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> n) {
  if (x.size() != n.size()) throw ConfigError("fit inputs differ in length");
  std::vector<double> lx, ln;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (n[i] > 0.0 && x[i] > 0.0 && std::isfinite(n[i]) && std::isfinite(x[i])) {
      lx.push_back(std::log(x[i]));
      ln.push_back(std::log(n[i]));
    }
  }
  if (lx.size() < 3)
    throw InsufficientDataError("power-law fit needs >= 3 positive points, got " +
                                std::to_string(lx.size()));
  const auto m = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = lx[static_cast<std::size_t>(i)];
    b[i] = ln[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  PowerLawFit fit;
  fit.coefficient = std::exp(c[0]);
  fit.exponent = c[1];
  fit.points = lx.size();
  fit.rms_log_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
  return fit;
}

double PolyFit::operator()(double x) const {
  double y = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + *it;
  return y;
}

std::optional<double> PolyFit::vertex() const {
  if (coefficients.size() != 3 || coefficients[2] == 0.0) return std::nullopt;
  return -coefficients[1] / (2.0 * coefficients[2]);
}

PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree) {
  if (degree < 0 || degree > 2) throw ConfigError("polynomial degree must be 0, 1 or 2");
  if (x.size() != y.size()) throw ConfigError("fit inputs differ in length");
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  if (x.size() < static_cast<std::size_t>(cols))
    throw InsufficientDataError("polynomial fit needs >= " + std::to_string(cols) + " points");
  const auto m = static_cast<Eigen::Index>(x.size());
  // Scaling x to [-1, 1] keeps the Vandermonde columns comparable.
  double lo = x[0], hi = x[0];
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mid = 0.5 * (lo + hi);
  const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = (x[static_cast<std::size_t>(i)] - mid) / half;
    double p = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k, p *= s) a(i, k) = p;
    b[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  // Expand q((x - mid) / half) back into powers of x.
  std::vector<double> out(static_cast<std::size_t>(cols), 0.0);
  const double c0 = c[0];
  const double c1 = cols > 1 ? c[1] : 0.0;
  const double c2 = cols > 2 ? c[2] : 0.0;
  const double u = 1.0 / half;
  const double w = -mid / half;
  out[0] = c0 + c1 * w + c2 * w * w;
  if (cols > 1) out[1] = c1 * u + 2.0 * c2 * u * w;
  if (cols > 2) out[2] = c2 * u * u;
  PolyFit fit;
  fit.coefficients = out;
  fit.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
  return fit;
}

std::string fit_report_json(const SweepResult& sweep, std::string_view mode) {
  sweep.validate();
  nlohmann::ordered_json j;
  j["mode"] = std::string(mode);
  auto& classes = j["classes"] = nlohmann::ordered_json::object();
  for (auto g : kRcGates) {
    std::vector<double> y(sweep.theta.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(sweep.count(i, g));
    nlohmann::ordered_json entry;
    entry["total"] = sweep.total(g);
    try {
      const auto p = fit_power_law(sweep.theta, y);
      entry["power_law"] = {{"coefficient", p.coefficient},
                            {"exponent", p.exponent},
                            {"rms_log_residual", p.rms_log_residual},
                            {"points", p.points}};
    } catch (const InsufficientDataError&) {
      entry["power_law"] = nullptr;
    }
    for (int degree : {1, 2}) {
      const char* key = degree == 1 ? "linear" : "quadratic";
      try {
        const auto p = fit_poly(sweep.theta, y, degree);
        nlohmann::ordered_json f;
        f["coefficients"] = p.coefficients;
        f["rms_residual"] = p.rms_residual;
        if (const auto v = p.vertex()) f["vertex_theta"] = *v;
        entry[key] = f;
      } catch (const InsufficientDataError&) {
        entry[key] = nullptr;
      }
    }
    classes[std::string(rc_gate_name(g))] = entry;
  }
  return j.dump(2) + "\n";
}

}  // namespace mycelogic
