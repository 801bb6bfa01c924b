#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cssball/errors.hpp"
#include "cssball/params.hpp"
#include "cssball/soliton.hpp"

// Linearization of the limit problem around u = w_k on a truncated line:
//   T[phi] = -phi'' + (omega + (int u^2)^2 / 4 - p u^(p-1)) phi
//   K[phi] = (int u^2) (int u phi) u
//   L = T + K
// discretized with second differences, homogeneous Dirichlet ends, and the
// trapezoid (here: h-weighted) inner product.

namespace cssball::linearized {

/// Interior nodes x_i = -X + (i+1) h, i = 0..n-1, of [-X, X] with h = 2X/(n+1).
struct LineGrid {
  double half_width = 40.0;
  std::size_t n = 2000;

  double h() const { return 2.0 * half_width / static_cast<double>(n + 1); }
  double x(std::size_t i) const { return -half_width + h() * static_cast<double>(i + 1); }

  /// Mesh scaled to the soliton width: half-width `widths / sqrt(k)`.
  static LineGrid for_soliton(double k, std::size_t n, double widths = 40.0) {
    require_positive(k, "k");
    return {widths / std::sqrt(k), n};
  }
};

using Vector = std::vector<double>;

inline double mesh_inner(const LineGrid& grid, std::span<const double> a,
                         std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return grid.h() * s;
}

inline double mesh_norm(const LineGrid& grid, std::span<const double> a) {
  return std::sqrt(mesh_inner(grid, a, a));
}

struct LinearizedOperator {
  LineGrid grid;
  double p = 2.0;
  double omega = 0.0;
  double k = 1.0;
  Vector diag;         // T: 2/h^2 + potential
  Vector offdiag;      // T: -1/h^2, size n-1
  Vector profile;      // u = w_k at the nodes
  double mass = 0.0;   // int u^2 (trapezoid)
  Vector translation;  // w_k' at the nodes
  double translation_residual = 0.0;  // |L[w_k']| / |w_k'|
  bool coarse_warning = false;

  std::size_t size() const { return diag.size(); }

  Vector apply_T(std::span<const double> x) const {
    const std::size_t n = size();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += offdiag[i - 1] * x[i - 1];
      if (i + 1 < n) v += offdiag[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }

  Vector apply_K(std::span<const double> x) const {
    const double c = mass * mesh_inner(grid, profile, x);
    Vector y(size());
    for (std::size_t i = 0; i < size(); ++i) y[i] = c * profile[i];
    return y;
  }

  Vector apply(std::span<const double> x) const {
    Vector y = apply_T(x);
    const double c = mass * mesh_inner(grid, profile, x);
    for (std::size_t i = 0; i < size(); ++i) y[i] += c * profile[i];
    return y;
  }

  /// Gershgorin bound on the operator norm.
  double norm_bound() const {
    double t = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      double row = std::abs(diag[i]);
      if (i > 0) row += std::abs(offdiag[i - 1]);
      if (i + 1 < size()) row += std::abs(offdiag[i]);
      t = std::max(t, row);
    }
    return t + mass * mesh_inner(grid, profile, profile);
  }

  Eigen::MatrixXd dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = diag[static_cast<std::size_t>(i)];
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
    const Eigen::Map<const Eigen::VectorXd> u(profile.data(), n);
    a += (mass * grid.h()) * u * u.transpose();
    return a;
  }
};

/// Relative translation-mode residual above which assemble_L warns.
inline constexpr double kCoarseGridTolerance = 1e-2;

inline LinearizedOperator assemble_L(double p, double omega, double k, const LineGrid& grid) {
  require_exponent(p);
  require_positive(k, "k");
  if (grid.n < 3) throw DomainError("linearized grid needs at least 3 nodes");
  LinearizedOperator op;
  op.grid = grid;
  op.p = p;
  op.omega = omega;
  op.k = k;
  const std::size_t n = grid.n;
  const double h = grid.h();
  op.profile.resize(n);
  op.translation.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.profile[i] = soliton::wk(p, k, grid.x(i));
    op.translation[i] = soliton::wk_prime(p, k, grid.x(i));
  }
  op.mass = mesh_inner(grid, op.profile, op.profile);
  const double shift = omega + 0.25 * op.mass * op.mass;
  op.diag.resize(n);
  op.offdiag.assign(n - 1, -1.0 / (h * h));
  for (std::size_t i = 0; i < n; ++i) {
    op.diag[i] = 2.0 / (h * h) + shift - p * std::pow(op.profile[i], p - 1.0);
  }
  const Vector lt = op.apply(op.translation);
  op.translation_residual = mesh_norm(grid, lt) / mesh_norm(grid, op.translation);
  op.coarse_warning = op.translation_residual > kCoarseGridTolerance;
  return op;
}

/// (2/(p-1)) w_k + x w_k': the kernel element at the tangent root.
inline Vector degenerate_direction(double p, double k, const LineGrid& grid) {
  require_exponent(p);
  Vector phi(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    phi[i] = 2.0 / (p - 1.0) * soliton::wk(p, k, x) + x * soliton::wk_prime(p, k, x);
  }
  return phi;
}

struct SpectrumOptions {
  std::size_t count = 4;            // eigenvalues reported
  std::size_t dense_limit = 1000;   // dense eigensolve up to this size
  double tol = 1e-9;                // eigen-residual tolerance (iterative path)
  int max_iter = 5000;
  std::uint64_t seed = 0;
  double flag_scale = 1e-6;         // degeneracy threshold relative to |L|
};

struct SpectrumReport {
  Vector eigenvalues;      // ascending, on the complement of the translation mode
  double coercivity = 0.0;
  bool degenerate = false;
  double threshold = 0.0;
  Vector lowest_vector;    // unit mesh norm
  int iterations = 0;
  std::string method;
};

namespace detail {

// LU of a symmetric diagonally dominant tridiagonal matrix (no pivoting).
class Tridiagonal {
 public:
  Tridiagonal(const Vector& diag, const Vector& off, double shift)
      : off_(off), pivot_(diag.size()) {
    pivot_[0] = diag[0] - shift;
    for (std::size_t i = 1; i < diag.size(); ++i) {
      pivot_[i] = diag[i] - shift - off_[i - 1] * off_[i - 1] / pivot_[i - 1];
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const std::size_t n = pivot_.size();
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    y[0] = b[0];
    for (std::size_t i = 1; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      y[ii] = b[ii] - off_[i - 1] / pivot_[i - 1] * y[ii - 1];
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    x[static_cast<Eigen::Index>(n - 1)] = y[static_cast<Eigen::Index>(n - 1)] / pivot_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      const auto ii = static_cast<Eigen::Index>(i);
      x[ii] = (y[ii] - off_[i] * x[ii + 1]) / pivot_[i];
    }
    return x;
  }

 private:
  Vector off_;
  Vector pivot_;
};

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline SpectrumReport dense_spectrum(const LinearizedOperator& op, std::size_t count) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::VectorXd t = to_eigen(op.translation).normalized();
  // Householder reflector sending t to a multiple of e_0.
  Eigen::VectorXd v = t;
  v[0] += (t[0] >= 0.0 ? 1.0 : -1.0);
  v.normalize();
  // (I - 2vv') A (I - 2vv') by rank-one updates.
  Eigen::MatrixXd b = op.dense();
  const Eigen::VectorXd av = b * v;
  const double vav = v.dot(av);
  b -= 2.0 * (v * av.transpose() + av * v.transpose());
  b += (4.0 * vav) * v * v.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.bottomRightCorner(n - 1, n - 1));
  SpectrumReport out;
  out.method = "dense";
  const auto m = std::min<Eigen::Index>(static_cast<Eigen::Index>(count), n - 1);
  for (Eigen::Index j = 0; j < m; ++j) out.eigenvalues.push_back(es.eigenvalues()[j]);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  full.tail(n - 1) = es.eigenvectors().col(0);
  const Eigen::VectorXd x = full - 2.0 * v.dot(full) * v;
  out.lowest_vector.assign(x.data(), x.data() + n);
  return out;
}

// Shift-invert subspace iteration for the lowest eigenpairs of P L P on the
// complement of the translation mode. The shift sits below the Gershgorin
// bound of T, so every shifted solve is positive definite.
inline SpectrumReport iterative_spectrum(const LinearizedOperator& op,
                                         const SpectrumOptions& opt) {
  const auto n = static_cast<Eigen::Index>(op.size());
  double lower = op.diag[0];
  for (std::size_t i = 0; i < op.size(); ++i) {
    double row = op.diag[i];
    if (i > 0) row -= std::abs(op.offdiag[i - 1]);
    if (i + 1 < op.size()) row -= std::abs(op.offdiag[i]);
    lower = std::min(lower, row);
  }
  const double shift = lower - 1e-3 * std::max(1.0, std::abs(lower));
  const Tridiagonal tri(op.diag, op.offdiag, shift);
  const Eigen::VectorXd u = to_eigen(op.profile);
  const double coef = op.mass * op.grid.h();
  const Eigen::VectorXd tu = tri.solve(u);
  const double denom = 1.0 + coef * u.dot(tu);
  auto solve_full = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd a = tri.solve(y);
    return Eigen::VectorXd(a - tu * (coef * u.dot(a) / denom));
  };
  const Eigen::VectorXd t = to_eigen(op.translation).normalized();
  const Eigen::VectorXd st = solve_full(t);
  const double tst = t.dot(st);
  auto solve_deflated = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd z = solve_full(y);
    return Eigen::VectorXd(z - st * (t.dot(z) / tst));
  };
  auto apply = [&](const Eigen::VectorXd& x) {
    const Vector y = op.apply(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    return to_eigen(y);
  };

  const auto block = static_cast<Eigen::Index>(std::max<std::size_t>(opt.count + 4, 6));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  }

  auto orthonormalize = [&](Eigen::MatrixXd& y) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) y.col(j) -= t * t.dot(y.col(j));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    y = qr.householderQ() * Eigen::MatrixXd::Identity(n, y.cols());
    for (Eigen::Index j = 0; j < y.cols(); ++j) y.col(j) -= t * t.dot(y.col(j));
  };
  orthonormalize(x);

  SpectrumReport out;
  out.method = "shift-invert";
  const auto wanted = std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.count), block);
  Eigen::VectorXd theta;
  for (int it = 1; it <= opt.max_iter; ++it) {
    Eigen::MatrixXd y(n, block);
    for (Eigen::Index j = 0; j < block; ++j) y.col(j) = solve_deflated(x.col(j));
    orthonormalize(y);
    Eigen::MatrixXd ay(n, block);
    for (Eigen::Index j = 0; j < block; ++j) ay.col(j) = apply(y.col(j));
    Eigen::MatrixXd g = y.transpose() * ay;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    theta = es.eigenvalues();
    x = y * es.eigenvectors();
    const Eigen::MatrixXd ax = ay * es.eigenvectors();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < wanted; ++j) {
      Eigen::VectorXd r = ax.col(j) - theta[j] * x.col(j);
      r -= t * t.dot(r);
      worst = std::max(worst, r.norm());
    }
    out.iterations = it;
    if (worst < opt.tol) break;
    if (it == opt.max_iter) {
      throw NumericalError("spectrum: subspace iteration did not converge", worst);
    }
  }
  for (Eigen::Index j = 0; j < wanted; ++j) out.eigenvalues.push_back(theta[j]);
  out.lowest_vector.assign(x.col(0).data(), x.col(0).data() + n);
  return out;
}

}  // namespace detail

/// Lowest eigenvalues of L restricted to the mesh-orthogonal complement of
/// the translation mode w_k'. The smallest one is the coercivity constant;
/// a value within `flag_scale * |L|` of zero sets the degeneracy flag.
inline SpectrumReport coercivity_constant(const LinearizedOperator& op,
                                          const SpectrumOptions& opt = {}) {
  SpectrumReport out = op.size() <= opt.dense_limit
                           ? detail::dense_spectrum(op, opt.count)
                           : detail::iterative_spectrum(op, opt);
  out.coercivity = out.eigenvalues.front();
  out.threshold = opt.flag_scale * op.norm_bound();
  out.degenerate = std::abs(out.coercivity) < out.threshold;
  const double nrm = mesh_norm(op.grid, out.lowest_vector);
  for (double& v : out.lowest_vector) v /= nrm;
  return out;
}

/// |<a, b>| / (|a| |b|) under the mesh inner product.
inline double mesh_cosine(const LineGrid& grid, std::span<const double> a,
                          std::span<const double> b) {
  return std::abs(mesh_inner(grid, a, b)) / (mesh_norm(grid, a) * mesh_norm(grid, b));
}

}  // namespace cssball::linearized
