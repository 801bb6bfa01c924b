#pragma once

#include <cmath>
#include <numbers>

#include "cssball/params.hpp"
#include "cssball/quadrature.hpp"

// Closed-form solitons of -w'' + k w = w^p on the line and their integrals.

namespace cssball::soliton {

namespace detail {

// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

}  // namespace detail

/// Positive even solution of -w'' + w = w^p:
///   w1(r) = ((2/(p+1)) cosh^2((p-1) r / 2))^(1/(1-p)).
inline double w1(double p, double r) {
  require_exponent(p);
  const double a = 0.5 * (p - 1.0);
  const double log_w = -(std::log(2.0 / (p + 1.0)) + 2.0 * detail::log_cosh(a * r)) / (p - 1.0);
  return std::exp(log_w);
}

/// d/dr w1 = -tanh((p-1) r / 2) w1.
inline double w1_prime(double p, double r) {
  return -std::tanh(0.5 * (p - 1.0) * r) * w1(p, r);
}

/// w_k(r) = k^(1/(p-1)) w1(sqrt(k) r).
inline double wk(double p, double k, double r) {
  require_positive(k, "k");
  return std::pow(k, 1.0 / (p - 1.0)) * w1(p, std::sqrt(k) * r);
}

inline double wk_prime(double p, double k, double r) {
  require_positive(k, "k");
  const double sk = std::sqrt(k);
  return std::pow(k, 1.0 / (p - 1.0)) * sk * w1_prime(p, sk * r);
}

/// -w'^2/2 + k w^2/2 - w^(p+1)/(p+1); identically zero along w_k.
inline double hamiltonian(double p, double k, double r) {
  const double w = wk(p, k, r);
  const double dw = wk_prime(p, k, r);
  return -0.5 * dw * dw + 0.5 * k * w * w - std::pow(w, p + 1.0) / (p + 1.0);
}

/// Amplitude A of the exponential tail w_k(r) ~ A exp(-sqrt(k) |r|).
inline double tail_amplitude(double p, double k) {
  require_exponent(p);
  require_positive(k, "k");
  return std::pow(2.0 * k * (p + 1.0), 1.0 / (p - 1.0));
}

struct QuadratureSpec {
  double tol = 1e-10;
};

/// m = int w1^2, with the two ratios int w1'^2 / m and int w1^(p+1) / m.
struct SolitonConstants {
  double m = 0.0;
  double kinetic_ratio = 0.0;
  double potential_ratio = 0.0;
};

/// Half-width beyond which the tails of w_k^2 are below `tol`.
inline double truncation(double p, double k, double tol) {
  return 2.0 / ((p - 1.0) * std::sqrt(k)) * std::log(1.0 / tol) + 10.0;
}

namespace detail {

template <typename F>
double integrate_line(F&& f, double half_width, double tol) {
  return quadrature::integrate(f, -half_width, half_width, tol).value;
}

}  // namespace detail

inline SolitonConstants compute_m(double p, QuadratureSpec spec = {}) {
  require_exponent(p);
  const double T = truncation(p, 1.0, spec.tol);
  const double m = detail::integrate_line(
      [p](double r) {
        const double w = w1(p, r);
        return w * w;
      },
      T, spec.tol);
  return {m, (p - 1.0) / (p + 3.0), 2.0 * (p + 1.0) / (p + 3.0)};
}

struct SolitonIntegrals {
  double mass = 0.0;       // int w_k^2
  double kinetic = 0.0;    // int w_k'^2
  double potential = 0.0;  // int w_k^(p+1)
};

/// Integrals of w_k from the scaling laws applied to the constants of w1.
inline SolitonIntegrals soliton_integrals(double p, double k, const SolitonConstants& c) {
  require_exponent(p);
  require_positive(k, "k");
  const double mass_scale = std::pow(k, (5.0 - p) / (2.0 * (p - 1.0)));
  const double energy_scale = std::pow(k, (p + 3.0) / (2.0 * (p - 1.0)));
  return {mass_scale * c.m, energy_scale * c.kinetic_ratio * c.m,
          energy_scale * c.potential_ratio * c.m};
}

inline SolitonIntegrals soliton_integrals(double p, double k, QuadratureSpec spec = {}) {
  return soliton_integrals(p, k, compute_m(p, spec));
}

/// The same three integrals by direct quadrature of w_k.
inline SolitonIntegrals soliton_integrals_quadrature(double p, double k,
                                                     QuadratureSpec spec = {}) {
  require_exponent(p);
  require_positive(k, "k");
  const double T = truncation(p, k, spec.tol);
  SolitonIntegrals out;
  out.mass = detail::integrate_line(
      [=](double r) {
        const double w = wk(p, k, r);
        return w * w;
      },
      T, spec.tol);
  out.kinetic = detail::integrate_line(
      [=](double r) {
        const double dw = wk_prime(p, k, r);
        return dw * dw;
      },
      T, spec.tol);
  out.potential = detail::integrate_line(
      [=](double r) { return std::pow(wk(p, k, r), p + 1.0); }, T, spec.tol);
  return out;
}

}  // namespace cssball::soliton
