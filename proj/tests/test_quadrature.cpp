#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cssball/quadrature.hpp"
#include "cssball/roots.hpp"

using namespace cssball;

TEST(GaussLegendre, WeightsSumToIntervalLength) {
  const auto& rule = quadrature::GaussLegendre<20>::instance();
  const double s = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(GaussLegendre, ExactForDegree39) {
  // int_{-1}^{1} x^38 = 2/39; odd powers vanish.
  const auto& rule = quadrature::GaussLegendre<20>::instance();
  double even = 0.0;
  double odd = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    even += rule.weights[i] * std::pow(rule.nodes[i], 38);
    odd += rule.weights[i] * std::pow(rule.nodes[i], 39);
  }
  EXPECT_NEAR(even, 2.0 / 39.0, 1e-14);
  EXPECT_NEAR(odd, 0.0, 1e-15);
}

TEST(Integrate, SmoothIntegrandToRoundOff) {
  const auto r = quadrature::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(r.value, std::exp(1.0) - 1.0, 1e-14);
}

TEST(Integrate, ReportsNonConvergence) {
  auto rough = [](double x) { return std::sqrt(std::abs(x - 0.3)); };
  try {
    quadrature::integrate(rough, 0.0, 1.0, 1e-15, 64);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_GT(e.achieved(), 0.0);
  }
}

TEST(Trapezoid, CumulativeExactOnLinear) {
  const double h = 0.1;
  std::vector<double> f(11);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * h * static_cast<double>(i) + 1.0;
  const auto F = quadrature::cumulative_trapezoid(f, h);
  const auto G = quadrature::reverse_cumulative_trapezoid(f, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = h * static_cast<double>(i);
    EXPECT_NEAR(F[i], x * x + x, 1e-14);
    EXPECT_NEAR(F[i] + G[i], F.back(), 1e-14);
  }
  const auto w = quadrature::trapezoid_weights(11, h);
  EXPECT_NEAR(std::inner_product(w.begin(), w.end(), f.begin(), 0.0), F.back(), 1e-14);
}

TEST(Roots, NewtonBisectCubeRoot) {
  auto f = [](double x) { return x * x * x - 2.0; };
  auto df = [](double x) { return 3.0 * x * x; };
  const auto r = roots::newton_bisect(f, df, 0.0, 2.0);
  EXPECT_NEAR(r.x, std::cbrt(2.0), 1e-15);
}

TEST(Roots, BisectAndMissingBracket) {
  auto f = [](double x) { return std::cos(x) - x; };
  EXPECT_NEAR(roots::bisect(f, 0.0, 1.0, 1e-14).x, 0.7390851332151607, 1e-13);
  EXPECT_THROW(roots::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
               DomainError);
}

TEST(Roots, GoldenSection) {
  const auto m = roots::golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-8);
  EXPECT_NEAR(m.x, 0.3, 1e-7);
}
