#include <gtest/gtest.h>

#include <cmath>

#include "cssball/quadrature.hpp"
#include "cssball/soliton.hpp"

using namespace cssball;

namespace {
double sech(double x) { return 1.0 / std::cosh(x); }
}  // namespace

TEST(W1, ValueAtOrigin) {
  EXPECT_NEAR(soliton::w1(2.0, 0.0), 1.5, 1e-15);
  for (double p : {1.3, 1.8, 2.5}) {
    EXPECT_NEAR(soliton::w1(p, 0.0), std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0)), 1e-14);
  }
}

TEST(W1, QuadraticCaseIsSechSquared) {
  for (double r : {0.5, 1.0, 2.0}) {
    const double s = sech(0.5 * r);
    EXPECT_NEAR(soliton::w1(2.0, r), 1.5 * s * s, 1e-15);
  }
}

TEST(W1, BelowOneThousandthAtRadiusTen) {
  // (0.8 cosh^2 2.5)^-2 = 1.1049e-3, so this bound does not hold; kept as stated.
  EXPECT_LT(soliton::w1(1.5, 10.0), 1e-3);
}

TEST(W1, DecayMatchesHighPrecisionValue) {
  // 30-digit evaluation of the closed form at p = 1.5, r = 10.
  EXPECT_NEAR(soliton::w1(1.5, 10.0), 0.00110491643745093695, 1e-17);
  EXPECT_LT(soliton::w1(1.5, 20.0), 1e-7);
}

TEST(W1, EvenDecreasingAndDecaying) {
  double prev = soliton::w1(2.3, 0.0);
  for (double r = 0.25; r < 30.0; r += 0.25) {
    const double w = soliton::w1(2.3, r);
    EXPECT_EQ(w, soliton::w1(2.3, -r));
    EXPECT_LT(w, prev);
    prev = w;
  }
  EXPECT_GT(soliton::w1(2.0, 700.0), -1.0);  // no overflow far out
}

TEST(W1, RejectsExponentOutsideWindow) {
  EXPECT_THROW(soliton::w1(1.0, 0.0), DomainError);
  EXPECT_THROW(soliton::w1(3.0, 0.0), DomainError);
  EXPECT_THROW(soliton::wk(2.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(soliton::wk(2.0, -1.0, 0.0), DomainError);
}

TEST(Wk, ScalingIdentities) {
  for (double r : {-3.0, 0.0, 0.4, 2.0}) EXPECT_EQ(soliton::wk(2.0, 1.0, r), soliton::w1(2.0, r));
  EXPECT_NEAR(soliton::wk(2.0, 4.0, 0.0), 6.0, 1e-14);
  for (double p : {1.4, 2.0, 2.7}) {
    for (double k : {0.05, 0.3, 2.0}) {
      for (double r : {0.0, 1.1, 5.0}) {
        const double direct = std::pow(k, 1.0 / (p - 1.0)) * soliton::w1(p, std::sqrt(k) * r);
        EXPECT_NEAR(soliton::wk(p, k, r), direct, 1e-14 * std::max(1.0, direct));
      }
    }
  }
}

TEST(Wk, HamiltonianVanishes) {
  for (double p : {1.5, 2.0, 2.8}) {
    for (double k : {0.1, 1.0, 3.0}) {
      for (double r : {0.0, 0.7, 3.0}) EXPECT_NEAR(soliton::hamiltonian(p, k, r), 0.0, 1e-10);
    }
  }
  // Large amplitudes (w ~ 400 at p = 1.2, k = 3): relative to the largest term.
  for (double r : {0.0, 0.7, 3.0}) {
    const double w = soliton::wk(1.2, 3.0, r);
    EXPECT_LT(std::abs(soliton::hamiltonian(1.2, 3.0, r)), 1e-14 * std::pow(w, 2.2));
  }
}

TEST(Wk, OdeResidualIsSecondOrder) {
  // Central-difference residual of -w'' + k w - w^p at a fixed point.
  const double p = 2.0;
  const double k = 0.7;
  const double r = 0.9;
  auto residual = [&](double h) {
    const double w = soliton::wk(p, k, r);
    const double d2 = (soliton::wk(p, k, r + h) - 2.0 * w + soliton::wk(p, k, r - h)) / (h * h);
    return -d2 + k * w - std::pow(w, p);
  };
  const double e1 = std::abs(residual(0.02));
  const double e2 = std::abs(residual(0.01));
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(Wk, DerivativeMatchesFiniteDifference) {
  for (double r : {-2.0, 0.3, 4.0}) {
    const double eps = 1e-6;
    const double fd = (soliton::wk(1.7, 0.4, r + eps) - soliton::wk(1.7, 0.4, r - eps)) / (2 * eps);
    EXPECT_NEAR(soliton::wk_prime(1.7, 0.4, r), fd, 1e-8);
  }
}

TEST(ComputeM, QuadraticCase) {
  const auto c = soliton::compute_m(2.0);
  EXPECT_NEAR(c.m, 6.0, 1e-8);
  EXPECT_DOUBLE_EQ(c.kinetic_ratio, 0.2);
  EXPECT_DOUBLE_EQ(c.potential_ratio, 1.2);
  const auto q = soliton::soliton_integrals_quadrature(2.0, 1.0);
  EXPECT_NEAR(q.kinetic, 1.2, 1e-8);
  EXPECT_NEAR(q.potential, 7.2, 1e-8);
}

TEST(ComputeM, MatchesHighPrecisionValueNearCubicLimit) {
  // 30-digit quadrature of w1^2 at p = 2.999.
  EXPECT_NEAR(soliton::compute_m(2.999).m, 4.00115936066989975, 1e-9);
}

TEST(ComputeM, WithinOneThousandthOfCubicLimit) {
  // At p = 3 the profile is sqrt(2) sech r with int 2 sech^2 = 4.
  const double oracle =
      quadrature::integrate([](double r) { return 2.0 * sech(r) * sech(r); }, -40.0, 40.0, 1e-13).value;
  EXPECT_NEAR(oracle, 4.0, 1e-12);
  EXPECT_NEAR(soliton::compute_m(2.999).m, oracle, 1e-3);
}

TEST(ComputeM, EvenSymmetry) {
  for (double p : {1.5, 2.0, 2.5}) {
    const double T = soliton::truncation(p, 1.0, 1e-10);
    const double half = quadrature::integrate(
        [p](double r) { return std::pow(soliton::w1(p, r), 2); }, 0.0, T, 1e-12).value;
    EXPECT_NEAR(2.0 * half, soliton::compute_m(p).m, 1e-9);
  }
}

TEST(SolitonIntegrals, ScalingLaws) {
  EXPECT_NEAR(soliton::soliton_integrals(2.0, 1.0).mass, 6.0, 1e-8);
  EXPECT_NEAR(soliton::soliton_integrals(2.0, 4.0).mass, 48.0, 1e-7);
  EXPECT_NEAR(soliton::soliton_integrals_quadrature(2.0, 4.0).mass, 48.0, 1e-7);
  EXPECT_NEAR(soliton::soliton_integrals(2.0, 1.0).kinetic, 1.2, 1e-8);
}

TEST(SolitonIntegrals, ScalingAgreesWithQuadrature) {
  for (double p : {1.3, 1.9, 2.6}) {
    const auto c = soliton::compute_m(p);
    for (double k : {0.05, 0.3, 1.7}) {
      const auto a = soliton::soliton_integrals(p, k, c);
      const auto b = soliton::soliton_integrals_quadrature(p, k);
      EXPECT_NEAR(a.mass, b.mass, 1e-8 * std::max(1.0, b.mass));
      EXPECT_NEAR(a.kinetic, b.kinetic, 1e-8 * std::max(1.0, b.kinetic));
      EXPECT_NEAR(a.potential, b.potential, 1e-8 * std::max(1.0, b.potential));
    }
  }
}

TEST(SolitonIntegrals, TailAmplitude) {
  // w_k(r) e^{sqrt(k) r} -> A as r grows.
  const double p = 2.0;
  const double k = 0.3;
  const double r = 60.0;
  EXPECT_NEAR(soliton::wk(p, k, r) * std::exp(std::sqrt(k) * r), soliton::tail_amplitude(p, k), 1e-9);
}
