#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "cssball/params.hpp"
#include "cssball/roots.hpp"
#include "cssball/soliton.hpp"

// The one-dimensional limit functional
//   J(u) = 1/2 int (u'^2 + omega u^2) + (int u^2)^3 / 24 - int |u|^(p+1) / (p+1),
// whose positive critical points are w_k with k solving
//   k = omega + m^2 k^((5-p)/(p-1)) / 4.

namespace cssball::limit {

struct Thresholds {
  double omega0 = 0.0;
  double omega1 = 0.0;
};

inline Thresholds thresholds(double p, double m) {
  require_exponent(p);
  require_positive(m, "m");
  const double e = (p - 1.0) / (2.0 * (3.0 - p));
  const double omega0 = (3.0 - p) / (3.0 + p) * std::pow(3.0, e) *
                        std::pow(2.0, 2.0 / (3.0 - p)) *
                        std::pow(m * m * (3.0 + p) / (p - 1.0), -e);
  const double c = (5.0 - p) * m * m / (4.0 * (p - 1.0));
  const double omega1 =
      std::pow(c, -e) - 0.25 * m * m * std::pow(c, -(5.0 - p) / (2.0 * (3.0 - p)));
  return {omega0, omega1};
}

/// Exponent (5-p)/(p-1) of the nonlinear term of the root equation.
inline double root_exponent(double p) { return (5.0 - p) / (p - 1.0); }

/// f(k) = m^2 k^q / 4 - k + omega; roots of f are the admissible k.
inline double root_function(double p, double omega, double m, double k) {
  return 0.25 * m * m * std::pow(k, root_exponent(p)) - k + omega;
}

/// Unique critical point of root_function: minimizer over k > 0.
inline double critical_k(double p, double m) {
  const double q = root_exponent(p);
  return std::pow(4.0 / (m * m * q), 1.0 / (q - 1.0));
}

struct LimitRoots {
  enum class Kind { none, tangent, pair };

  Kind kind = Kind::none;
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double k2 = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;  // largest |f(k)| over returned roots

  /// The double root in the tangent case.
  double k0() const { return k1; }
};

inline std::string_view to_string(LimitRoots::Kind kind) {
  switch (kind) {
    case LimitRoots::Kind::none:
      return "none";
    case LimitRoots::Kind::tangent:
      return "tangent";
    case LimitRoots::Kind::pair:
      return "pair";
  }
  return "none";
}

/// |omega - omega1| below this is classified as the tangent case.
inline constexpr double kTangencyTolerance = 1e-9;

inline LimitRoots solve_k(const Params& params, double m) {
  params.validate();
  require_positive(m, "m");
  const double p = params.p;
  const double omega = params.omega;
  const double q = root_exponent(p);
  auto f = [&](double k) { return root_function(p, omega, m, k); };
  auto df = [&](double k) { return 0.25 * m * m * q * std::pow(k, q - 1.0) - 1.0; };

  const double k_star = critical_k(p, m);
  const double omega1 = thresholds(p, m).omega1;
  LimitRoots out;
  if (std::abs(omega - omega1) < kTangencyTolerance) {
    out.kind = LimitRoots::Kind::tangent;
    out.k1 = out.k2 = k_star;
    out.residual = std::abs(f(k_star));
    return out;
  }
  if (f(k_star) > 0.0) return out;

  out.kind = LimitRoots::Kind::pair;
  // f(0) = omega > 0 > f(k_star); f grows like k^q with q > 1.
  double k_max = 2.0 * k_star;
  while (f(k_max) <= 0.0) k_max *= 2.0;
  const auto lower = roots::newton_bisect(f, df, 0.0, k_star);
  const auto upper = roots::newton_bisect(f, df, k_star, k_max);
  out.k1 = lower.x;
  out.k2 = upper.x;
  out.residual = std::max(std::abs(f(out.k1)), std::abs(f(out.k2)));
  return out;
}

/// Samples on a uniform 1-D mesh x_i = x0 + i h.
struct Profile1D {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<double> values;

  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
};

template <typename F>
Profile1D sample(F&& f, double half_width, std::size_t count) {
  Profile1D out;
  out.x0 = -half_width;
  out.h = 2.0 * half_width / static_cast<double>(count - 1);
  out.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.values[i] = f(out.x(i));
  return out;
}

inline Profile1D sample_soliton(double p, double k, double half_width, std::size_t count) {
  return sample([=](double x) { return soliton::wk(p, k, x); }, half_width, count);
}

namespace detail {

// Sixth-order central first derivative, degrading to lower order near the
// ends of the mesh.
inline std::vector<double> derivative(const Profile1D& u) {
  const auto& v = u.values;
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 3 && i + 3 < n) {
      d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] -
              9.0 * v[i + 2] + v[i + 3]) /
             (60.0 * u.h);
    } else if (i >= 2 && i + 2 < n) {
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * u.h);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (v[i + 1] - v[i - 1]) / (2.0 * u.h);
    } else if (i == 0) {
      d[i] = (v[1] - v[0]) / u.h;
    } else {
      d[i] = (v[n - 1] - v[n - 2]) / u.h;
    }
  }
  return d;
}

}  // namespace detail

struct JValue {
  double value = 0.0;
  double boundary_magnitude = 0.0;  // max |u| at the two ends
  bool truncated = false;           // boundary_magnitude above tolerance
};

/// J(u) by trapezoid quadrature of the sampled profile.
inline JValue J_eval(double p, double omega, const Profile1D& u,
                     double boundary_tol = 1e-8) {
  require_exponent(p);
  JValue out;
  if (u.size() == 0) return out;
  const auto w = quadrature::trapezoid_weights(u.size(), u.h);
  const auto du = detail::derivative(u);
  double mass = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u.values[i];
    mass += w[i] * v * v;
    kinetic += w[i] * du[i] * du[i];
    potential += w[i] * std::pow(std::abs(v), p + 1.0);
  }
  out.value = 0.5 * (kinetic + omega * mass) + mass * mass * mass / 24.0 -
              potential / (p + 1.0);
  out.boundary_magnitude = std::max(std::abs(u.values.front()), std::abs(u.values.back()));
  out.truncated = out.boundary_magnitude > boundary_tol;
  return out;
}

/// J(w_k) assembled from the scaled soliton integrals.
inline double J_closed(double p, double omega, double k,
                       const soliton::SolitonConstants& constants) {
  const auto s = soliton::soliton_integrals(p, k, constants);
  return 0.5 * (s.kinetic + omega * s.mass) + s.mass * s.mass * s.mass / 24.0 -
         s.potential / (p + 1.0);
}

/// The frequency at which J(w_{k2(omega)}) changes sign, located by bisection
/// in omega on (0, omega1).
inline double omega0_by_sign_change(double p, const soliton::SolitonConstants& constants,
                                    double tol = 1e-13) {
  const double omega1 = thresholds(p, constants.m).omega1;
  auto g = [&](double omega) {
    const auto roots = solve_k({p, omega}, constants.m);
    return J_closed(p, omega, roots.k2, constants);
  };
  const double lo = 1e-6 * omega1;
  const double hi = omega1 * (1.0 - 1e-6);
  return roots::bisect(g, lo, hi, tol).x;
}

}  // namespace cssball::limit
