#include "mycelogic/fit.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "mycelogic/error.hpp"

namespace mycelogic {
namespace {

std::vector<double> sample(const std::vector<double>& x, double (*f)(double, double, double), double a,
                           double b) {
  std::vector<double> y;
  for (double v : x) y.push_back(f(v, a, b));
  return y;
}

double power(double x, double a, double k) { return a * std::pow(x, k); }

TEST(PowerLaw, RecoversReferenceSerialLaws) {
  const auto grid = theta_grid();
  for (auto [a, k] : {std::pair{72.0, -0.98}, std::pair{2203.0, -0.48}, std::pair{0.02, -1.6}}) {
    const auto fit = fit_power_law(grid, sample(grid, power, a, k));
    EXPECT_NEAR(fit.exponent, k, 0.01);
    EXPECT_NEAR(fit.coefficient, a, 0.01 * a);
    EXPECT_LT(fit.rms_log_residual, 1e-9);
    EXPECT_EQ(fit.points, grid.size());
    EXPECT_NEAR(fit(0.01), power(0.01, a, k), 1e-6 * power(0.01, a, k));
  }
}

TEST(PowerLaw, ConstantCountsGiveZeroExponent) {
  const auto grid = theta_grid();
  const std::vector<double> y(grid.size(), 40.0);
  const auto fit = fit_power_law(grid, y);
  EXPECT_NEAR(fit.exponent, 0.0, 1e-9);
  EXPECT_NEAR(fit.coefficient, 40.0, 1e-6);
}

TEST(PowerLaw, SkipsZerosAndNeedsThreePoints) {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> y{2.0, 0.0, 0.0, 0.0, 10.0};
  EXPECT_THROW(fit_power_law(x, y), InsufficientDataError);
  y[2] = 3.0;
  const auto fit = fit_power_law(x, y);
  EXPECT_EQ(fit.points, 3u);
  EXPECT_THROW(fit_power_law(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), Error);
}

TEST(PolyFit, ExactLineRecovered) {
  const auto grid = theta_grid();
  std::vector<double> y;
  for (double x : grid) y.push_back(3.5 - 120.0 * x);
  const auto fit = fit_poly(grid, y, 1);
  ASSERT_EQ(fit.coefficients.size(), 2u);
  EXPECT_NEAR(fit.coefficients[0], 3.5, 1e-9 * 3.5);
  EXPECT_NEAR(fit.coefficients[1], -120.0, 1e-9 * 120.0);
  EXPECT_FALSE(fit.vertex().has_value());
}

TEST(PolyFit, ReferenceParallelAndLine) {
  const auto grid = theta_grid();
  std::vector<double> y;
  for (double x : grid) y.push_back(-1.72e6 + 2.25e8 * x);
  const auto fit = fit_poly(grid, y, 1);
  EXPECT_NEAR(fit.coefficients[1], 2.25e8, 2.25e8 * 1e-3);
  EXPECT_NEAR(fit.coefficients[0], -1.72e6, 1.72e6 * 1e-3);
}

TEST(PolyFit, ParabolaVertexRecovered) {
  const auto grid = theta_grid();
  std::vector<double> y;
  for (double x : grid) y.push_back(5e6 - 4e9 * (x - 0.023) * (x - 0.023));
  const auto fit = fit_poly(grid, y, 2);
  ASSERT_TRUE(fit.vertex().has_value());
  EXPECT_NEAR(*fit.vertex(), 0.023, 1e-9);
}

// The reference SELECT quadratic (9.61e6 + 1.21e9 x - 2.7 x^2) has its
// stationary point at 1.21e9 / 5.4, far outside the theta range, so it
// cannot be the curve that peaks at 0.023.
TEST(PolyFit, ReferenceSelectQuadraticDoesNotPeakInRange) {
  const auto grid = theta_grid();
  std::vector<double> y;
  for (double x : grid) y.push_back(9.61e6 + 1.21e9 * x - 2.7 * x * x);
  const auto fit = fit_poly(grid, y, 2);
  ASSERT_TRUE(fit.vertex().has_value());
  const double printed_vertex = 1.21e9 / (2 * 2.7);
  EXPECT_GT(*fit.vertex(), 1e6);
  EXPECT_NEAR(fit.coefficients[1], 1.21e9, 1.21e9 * 1e-6);
  EXPECT_GT(printed_vertex, grid.back());
}

TEST(PolyFit, Errors) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(fit_poly(x, x, 3), ConfigError);
  EXPECT_THROW(fit_poly(x, x, -1), ConfigError);
  EXPECT_THROW(fit_poly(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 2), InsufficientDataError);
  const auto c = fit_poly(x, std::vector<double>{2, 4, 6}, 0);
  EXPECT_NEAR(c.coefficients[0], 4.0, 1e-12);
}

TEST(FitReport, ListsEveryClass) {
  SweepResult s;
  s.theta = theta_grid(1e-3, 10);
  s.counts.resize(10);
  for (std::size_t i = 0; i < 10; ++i) s.counts[i] = {10 * (i + 1), 0, 1, 100 - i, 0};
  const auto j = nlohmann::json::parse(fit_report_json(s, "serial"));
  EXPECT_EQ(j["mode"], "serial");
  for (const char* name : {"and", "or", "andnot", "select", "xor"}) ASSERT_TRUE(j["classes"].contains(name));
  EXPECT_TRUE(j["classes"]["or"]["power_law"].is_null());
  EXPECT_NEAR(j["classes"]["and"]["power_law"]["exponent"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(j["classes"]["select"]["total"], 955);
}

}  // namespace
}  // namespace mycelogic
