#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cssball/errors.hpp"
#include "cssball/params.hpp"
#include "cssball/quadrature.hpp"

// Radial discretization of
//   I_R(u) = 2 pi int_0^R [ (u'^2 + omega u^2)/2 + u^2 S(r)^2 / (8 r^2)
//                            - |u|^(p+1)/(p+1) ] r dr,   S(r) = int_0^r s u^2 ds,
// on nodes r_i = i h, i = 0..n+1, h = R/(n+1). u_{n+1} = 0 is structural, u_0
// is a free unknown. Every integral uses the trapezoid rule; u' uses midpoint
// differences, so the gradient below is the exact derivative of the discrete
// energy.

namespace cssball::radial {

using Vector = std::vector<double>;

class Grid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  Grid(double radius, std::size_t n) : R_(radius), n_(n) {
    require_positive(radius, "radius");
    if (n < kMinNodes) {
      throw DomainError("grid needs at least " + std::to_string(kMinNodes) +
                        " interior nodes, got " + std::to_string(n));
    }
    h_ = R_ / static_cast<double>(n_ + 1);
  }

  double R() const { return R_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return n_ + 2; }

  double r(std::size_t i) const { return i == n_ + 1 ? R_ : h_ * static_cast<double>(i); }

  Vector nodes() const {
    Vector out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = r(i);
    return out;
  }

  /// Trapezoid weight of node i.
  double weight(std::size_t i) const { return (i == 0 || i == n_ + 1) ? 0.5 * h_ : h_; }

  /// Area (divided by 2 pi) of the annulus owned by node i.
  double cell_mass(std::size_t i) const { return i == 0 ? h_ * h_ / 8.0 : h_ * r(i); }

  bool operator==(const Grid&) const = default;

 private:
  double R_;
  std::size_t n_;
  double h_ = 0.0;
};

/// Grid with n = ceil(nodes_per_unit * R) interior nodes.
inline Grid default_grid(double radius, double nodes_per_unit = 40.0) {
  require_positive(radius, "radius");
  const auto n = static_cast<std::size_t>(std::ceil(nodes_per_unit * radius));
  return Grid(radius, std::max(n, Grid::kMinNodes));
}

namespace detail {

// S_i = int_0^{r_i} s u^2 ds by the trapezoid rule.
inline Vector prefix_mass(const Grid& g, std::span<const double> u) {
  Vector f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.r(i) * u[i] * u[i];
  return quadrature::cumulative_trapezoid(f, g.h());
}

// c_i = w_i / r_i with the analytic limit 0 at the origin.
inline double inv_r_weight(const Grid& g, std::size_t i) {
  return i == 0 ? 0.0 : g.weight(i) / g.r(i);
}

// Suffix sums sum_i a_{ik} q_i of the transposed trapezoid prefix operator
// (a_{ik} is the weight of node k in the prefix integral up to node i).
inline Vector transpose_prefix(const Grid& g, std::span<const double> q) {
  const std::size_t N = g.size();
  const double h = g.h();
  Vector out(N, 0.0);
  double tail = 0.0;  // sum_{i > k} q_i
  for (std::size_t k = N; k-- > 0;) {
    out[k] = (k == 0 ? 0.5 * h * tail : 0.5 * h * q[k] + h * tail);
    tail += q[k];
  }
  return out;
}

}  // namespace detail

/// Node values together with the cached gauge integrals
///   H_i = (1/2) int_0^{r_i} s u^2 ds,  Tail_i = int_{r_i}^R (H(s)/s) u^2 ds.
/// Immutable once built.
class RadialField {
 public:
  RadialField(Grid grid, Vector u) : grid_(grid), u_(std::move(u)) {
    if (u_.size() != grid_.size()) {
      throw DomainError("field has " + std::to_string(u_.size()) + " values, grid needs " +
                        std::to_string(grid_.size()));
    }
    if (u_.back() != 0.0) {
      throw DomainError("field violates the Dirichlet condition: u(R) = " +
                        std::to_string(u_.back()));
    }
    const Vector S = detail::prefix_mass(grid_, u_);
    H_.resize(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) H_[i] = 0.5 * S[i];
    Vector f(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) f[i] = H_[i] / grid_.r(i) * u_[i] * u_[i];
    Tail_ = quadrature::reverse_cumulative_trapezoid(f, grid_.h());
  }

  static RadialField zero(const Grid& grid) { return {grid, Vector(grid.size(), 0.0)}; }

  const Grid& grid() const { return grid_; }
  const Vector& u() const { return u_; }
  const Vector& H() const { return H_; }
  const Vector& Tail() const { return Tail_; }

 private:
  Grid grid_;
  Vector u_;
  Vector H_;
  Vector Tail_;
};

struct EnergyReport {
  double total = 0.0;
  double kinetic = 0.0;
  double mass = 0.0;
  double nonlocal = 0.0;
  double potential = 0.0;  // enters the total with a minus sign
  // Diagnostics for the caller.
  double min_u = 0.0;
  bool has_nan = false;
};

inline EnergyReport energy(const Params& params, const RadialField& field) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const double h = g.h();
  const double p = params.p;
  EnergyReport rep;
  rep.min_u = std::numeric_limits<double>::infinity();
  double kin = 0.0;
  double mass = 0.0;
  double nl = 0.0;
  double pot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ui = u[i];
    if (std::isnan(ui)) rep.has_nan = true;
    rep.min_u = std::min(rep.min_u, ui);
    if (i + 1 < g.size()) {
      const double d = (u[i + 1] - ui) / h;
      kin += 0.5 * (g.r(i) + g.r(i + 1)) * d * d;
    }
    const double wr = g.weight(i) * g.r(i);
    mass += wr * ui * ui;
    pot += wr * std::pow(std::abs(ui), p + 1.0);
    const double S = 2.0 * field.H()[i];
    nl += detail::inv_r_weight(g, i) * ui * ui * S * S;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  rep.kinetic = two_pi * 0.5 * h * kin;
  rep.mass = two_pi * 0.5 * params.omega * mass;
  rep.nonlocal = two_pi * nl / 8.0;
  rep.potential = two_pi * pot / (p + 1.0);
  rep.total = rep.kinetic + rep.mass + rep.nonlocal - rep.potential;
  return rep;
}

namespace detail {

// Everything in the gradient except the nonlocal suffix term, divided by 2 pi.
inline Vector local_gradient(const Params& params, const RadialField& field) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const double h = g.h();
  const std::size_t N = g.size();
  Vector out(N, 0.0);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    double v = 0.0;
    if (k > 0) v += 0.5 * (g.r(k - 1) + g.r(k)) * (u[k] - u[k - 1]) / h;
    v -= 0.5 * (g.r(k) + g.r(k + 1)) * (u[k + 1] - u[k]) / h;
    const double wr = g.weight(k) * g.r(k);
    v += params.omega * wr * u[k];
    const double S = 2.0 * field.H()[k];
    v += 0.25 * inv_r_weight(g, k) * u[k] * S * S;
    v -= wr * std::pow(std::abs(u[k]), params.p - 1.0) * u[k];
    out[k] = v;
  }
  return out;
}

}  // namespace detail

/// Exact derivative of the discrete energy with respect to the node values,
/// assembled in O(n) through suffix sums. The Dirichlet entry is zero.
inline Vector gradient(const Params& params, const RadialField& field) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const std::size_t N = g.size();
  Vector out = detail::local_gradient(params, field);
  Vector q(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double S = 2.0 * field.H()[i];
    q[i] = detail::inv_r_weight(g, i) * u[i] * u[i] * S;
  }
  const Vector t = detail::transpose_prefix(g, q);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    out[k] = two_pi * (out[k] + 0.5 * g.r(k) * u[k] * t[k]);
  }
  out[N - 1] = 0.0;
  return out;
}

/// Same derivative, with the nonlocal term scattered from every outer node i
/// onto the inner nodes k <= i. O(n^2); reference for the suffix form.
inline Vector gradient_prefix_form(const Params& params, const RadialField& field) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const std::size_t N = g.size();
  const double h = g.h();
  Vector out = detail::local_gradient(params, field);
  for (std::size_t i = 1; i < N; ++i) {
    const double S = 2.0 * field.H()[i];
    const double qi = detail::inv_r_weight(g, i) * u[i] * u[i] * S;
    for (std::size_t k = 0; k <= i; ++k) {
      const double a = (k == 0 || k == i) ? 0.5 * h : h;
      out[k] += 0.5 * g.r(k) * u[k] * a * qi;
    }
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k + 1 < N; ++k) out[k] *= two_pi;
  out[N - 1] = 0.0;
  return out;
}

/// Action of the discrete Hessian of the energy at `field` on `v`.
/// Entries of v at the Dirichlet node are ignored.
inline Vector hessian_apply(const Params& params, const RadialField& field,
                            std::span<const double> direction) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const std::size_t N = g.size();
  const double h = g.h();
  if (direction.size() != N) throw DomainError("direction size does not match grid");
  Vector v(direction.begin(), direction.end());
  v[N - 1] = 0.0;

  Vector S(N);
  for (std::size_t i = 0; i < N; ++i) S[i] = 2.0 * field.H()[i];
  Vector f(N);
  for (std::size_t j = 0; j < N; ++j) f[j] = 2.0 * g.r(j) * u[j] * v[j];
  const Vector Sdot = quadrature::cumulative_trapezoid(f, h);

  Vector q(N);
  Vector qdot(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double c = detail::inv_r_weight(g, i);
    q[i] = c * u[i] * u[i] * S[i];
    qdot[i] = c * (2.0 * u[i] * v[i] * S[i] + u[i] * u[i] * Sdot[i]);
  }
  const Vector tq = detail::transpose_prefix(g, q);
  const Vector tqdot = detail::transpose_prefix(g, qdot);

  Vector out(N, 0.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    double y = 0.0;
    if (k > 0) y += 0.5 * (g.r(k - 1) + g.r(k)) * (v[k] - v[k - 1]) / h;
    y -= 0.5 * (g.r(k) + g.r(k + 1)) * (v[k + 1] - v[k]) / h;
    const double wr = g.weight(k) * g.r(k);
    y += params.omega * wr * v[k];
    const double c = detail::inv_r_weight(g, k);
    y += 0.25 * c * v[k] * S[k] * S[k] + 0.5 * c * u[k] * S[k] * Sdot[k];
    y += 0.5 * g.r(k) * (v[k] * tq[k] + u[k] * tqdot[k]);
    y -= params.p * wr * std::pow(std::abs(u[k]), params.p - 1.0) * v[k];
    out[k] = two_pi * y;
  }
  return out;
}

/// Strong-form residual
///   -u'' - u'/r + (omega + H^2/r^2 + Tail) u - |u|^(p-1) u
/// with centered second-order stencils; at r = 0 the Laplacian is 2 u''(0).
inline Vector el_residual(const Params& params, const RadialField& field) {
  const Grid& g = field.grid();
  const auto& u = field.u();
  const auto& H = field.H();
  const auto& T = field.Tail();
  const std::size_t N = g.size();
  const double h = g.h();
  Vector out(N, 0.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    double lap;
    double gauge = 0.0;
    if (i == 0) {
      lap = 4.0 * (u[1] - u[0]) / (h * h);
    } else {
      const double r = g.r(i);
      lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) + (u[i + 1] - u[i - 1]) / (2.0 * h * r);
      gauge = H[i] * H[i] / (r * r);
    }
    out[i] = -lap + (params.omega + gauge + T[i]) * u[i] -
             std::pow(std::abs(u[i]), params.p - 1.0) * u[i];
  }
  return out;
}

/// Dual norm of a gradient against the lumped area mass 2 pi m_k: the
/// L^2(B_R) size of the residual the gradient represents.
inline double weighted_norm(const Grid& g, std::span<const double> grad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) s += grad[k] * grad[k] / (two_pi * g.cell_mass(k));
  return std::sqrt(s);
}

/// r-weighted trapezoid product int a b r dr.
inline double r_inner(const Grid& g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * g.r(i) * a[i] * b[i];
  return s;
}

/// Discrete H_R product int (a' b' + omega a b) r dr.
inline double energy_inner(const Grid& g, double omega, std::span<const double> a,
                           std::span<const double> b) {
  const double h = g.h();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    s += h * 0.5 * (g.r(j) + g.r(j + 1)) * (a[j + 1] - a[j]) / h * (b[j + 1] - b[j]) / h;
  }
  return s + omega * r_inner(g, a, b);
}

/// 2 pi (stiffness + omega mass) on the free nodes 0..n, factored once.
/// Symmetric positive definite tridiagonal; `solve` leaves the Dirichlet entry 0.
class Preconditioner {
 public:
  Preconditioner(const Grid& g, double omega) : n_(g.size() - 1) {
    const double h = g.h();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Vector diag(n_);
    off_.assign(n_ > 0 ? n_ - 1 : 0, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      const double right = 0.5 * (g.r(k) + g.r(k + 1)) / h;
      const double left = k > 0 ? 0.5 * (g.r(k - 1) + g.r(k)) / h : 0.0;
      diag[k] = two_pi * (left + right + omega * g.weight(k) * g.r(k));
      if (k + 1 < n_) off_[k] = -two_pi * right;
    }
    apply_diag_ = diag;
    pivot_.resize(n_);
    pivot_[0] = diag[0];
    for (std::size_t k = 1; k < n_; ++k) {
      pivot_[k] = diag[k] - off_[k - 1] * off_[k - 1] / pivot_[k - 1];
    }
  }

  Vector solve(std::span<const double> b) const {
    Vector y(n_ + 1, 0.0);
    y[0] = b[0];
    for (std::size_t k = 1; k < n_; ++k) y[k] = b[k] - off_[k - 1] / pivot_[k - 1] * y[k - 1];
    y[n_ - 1] /= pivot_[n_ - 1];
    for (std::size_t k = n_ - 1; k-- > 0;) y[k] = (y[k] - off_[k] * y[k + 1]) / pivot_[k];
    y[n_] = 0.0;
    return y;
  }

  Vector apply(std::span<const double> x) const {
    Vector y(n_ + 1, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      double v = apply_diag_[k] * x[k];
      if (k > 0) v += off_[k - 1] * x[k - 1];
      if (k + 1 < n_) v += off_[k] * x[k + 1];
      y[k] = v;
    }
    return y;
  }

 private:
  std::size_t n_;
  Vector apply_diag_;
  Vector off_;
  Vector pivot_;
};

}  // namespace cssball::radial
