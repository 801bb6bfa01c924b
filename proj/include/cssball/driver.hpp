#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cssball/errors.hpp"
#include "cssball/limit.hpp"
#include "cssball/params.hpp"
#include "cssball/radial.hpp"
#include "cssball/roots.hpp"
#include "cssball/soliton.hpp"

namespace cssball::driver {

using radial::Grid;
using radial::RadialField;
using radial::Vector;

/// Limit data needed by the ball problem: U = w_{k2} and J(U).
struct LimitData {
  double m = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double J = 0.0;  // J(w_{k2})
};

inline LimitData limit_data(const Params& params) {
  params.validate();
  const auto constants = soliton::compute_m(params.p);
  const auto roots = limit::solve_k(params, constants.m);
  if (roots.kind == limit::LimitRoots::Kind::none) {
    throw DomainError("omega above omega1: the limit equation has no solution");
  }
  return {constants.m, roots.k1, roots.k2,
          limit::J_closed(params.p, params.omega, roots.k2, constants)};
}

inline double default_alpha(double p) { return 0.5 * (std::max(0.5, 1.0 / p) + 1.0); }
inline double default_beta(double p, double alpha) {
  return 0.5 * (1.0 + std::min(2.0, p) * alpha);
}

inline void validate_exponents(double p, double alpha, double beta) {
  const double a_lo = std::max(0.5, 1.0 / p);
  if (!(alpha > a_lo && alpha < 1.0)) {
    throw DomainError("alpha outside (" + std::to_string(a_lo) + ", 1): alpha = " +
                      std::to_string(alpha));
  }
  const double b_hi = std::min(2.0, p) * alpha;
  if (!(beta > 1.0 && beta < b_hi)) {
    throw DomainError("beta outside (1, " + std::to_string(b_hi) + "): beta = " +
                      std::to_string(beta));
  }
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

/// [R - beta log R / (2 sqrt k), R - alpha log R / (2 sqrt k)].
inline Interval scan_interval(double R, double k2, double alpha, double beta) {
  const double L = std::log(R) / (2.0 * std::sqrt(k2));
  return {R - beta * L, R - alpha * L};
}

/// Smooth monotone cutoff: 0 on [0, R/4], 1 on [R/2, R], quintic bridge.
inline double cutoff(double r, double R) {
  const double t = std::clamp((r - 0.25 * R) / (0.25 * R), 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

struct AnsatzSpec {
  double p = 2.0;
  double R = 0.0;
  double rho = 0.0;
  double k2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  Interval interval() const { return scan_interval(R, k2, alpha, beta); }

  void validate() const {
    require_exponent(p);
    require_positive(R, "radius");
    require_positive(k2, "k2");
    validate_exponents(p, alpha, beta);
    const Interval I = interval();
    if (!I.contains(rho, 1e-9 * R)) {
      throw DomainError("rho = " + std::to_string(rho) + " outside the scan interval [" +
                        std::to_string(I.lo) + ", " + std::to_string(I.hi) + "]");
    }
  }

  /// Spec with the default exponents; rho defaults to the interval midpoint.
  static AnsatzSpec make(double p, double R, double k2, std::optional<double> rho = {},
                         std::optional<double> alpha = {}, std::optional<double> beta = {}) {
    AnsatzSpec s;
    s.p = p;
    s.R = R;
    s.k2 = k2;
    s.alpha = alpha.value_or(default_alpha(p));
    s.beta = beta.value_or(default_beta(p, s.alpha));
    const Interval I = s.interval();
    s.rho = rho.value_or(0.5 * (I.lo + I.hi));
    s.validate();
    return s;
  }
};

/// z_rho = phi_R (U(r - rho) - U(R - rho) e^{sqrt k (r - R)}).
inline RadialField build_ansatz(const Params& params, const Grid& grid, const AnsatzSpec& spec) {
  spec.validate();
  if (grid.R() != spec.R) throw DomainError("ansatz radius does not match the grid");
  const double p = params.p;
  const double k = spec.k2;
  const double sk = std::sqrt(k);
  const double R = spec.R;
  const double edge = soliton::wk(p, k, R - spec.rho);
  Vector u(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r = grid.r(i);
    const double phi = cutoff(r, R);
    if (phi == 0.0) continue;
    u[i] = phi * (soliton::wk(p, k, r - spec.rho) - edge * std::exp(sk * (r - R)));
  }
  return {grid, std::move(u)};
}

/// d z_rho / d rho = phi_R (-U'(r - rho) + U'(R - rho) e^{sqrt k (r - R)}).
inline RadialField tangent_direction(const Params& params, const Grid& grid,
                                     const AnsatzSpec& spec) {
  spec.validate();
  if (grid.R() != spec.R) throw DomainError("ansatz radius does not match the grid");
  const double p = params.p;
  const double k = spec.k2;
  const double sk = std::sqrt(k);
  const double R = spec.R;
  const double edge = soliton::wk_prime(p, k, R - spec.rho);
  Vector u(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r = grid.r(i);
    const double phi = cutoff(r, R);
    if (phi == 0.0) continue;
    u[i] = phi * (-soliton::wk_prime(p, k, r - spec.rho) + edge * std::exp(sk * (r - R)));
  }
  return {grid, std::move(u)};
}

/// Two-term expansion 2 pi J rho + 2 pi sqrt(k) rho e^{-2 sqrt(k) (R - rho)}.
inline double model_phi(double J, double k2, double R, double rho) {
  const double sk = std::sqrt(k2);
  return 2.0 * std::numbers::pi * (J * rho + sk * rho * std::exp(-2.0 * sk * (R - rho)));
}

/// Minimizer of model_phi over (0, R); NaN when J >= 0 (no interior minimum).
inline double model_minimizer(double J, double k2, double R) {
  if (!(J < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double sk = std::sqrt(k2);
  auto slope = [&](double rho) {
    return J + sk * std::exp(-2.0 * sk * (R - rho)) * (1.0 + 2.0 * sk * rho);
  };
  return roots::bisect(slope, 0.0, R, 1e-12 * R).x;
}

struct ScanConfig {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::size_t samples = 64;
  double refine_tol = 1e-3;
};

struct ScanResult {
  double R = 0.0;
  double k2 = 0.0;
  double J = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Interval interval;
  Vector rho_grid;
  Vector phi;
  Vector model_phi;
  double rho_star = 0.0;
  double phi_star = 0.0;
  bool on_boundary = false;
  double model_rho_star = std::numeric_limits<double>::quiet_NaN();
  double max_relative_error = 0.0;  // max over samples of |phi - model| / |model|
};

inline double reduced_energy(const Params& params, const Grid& grid, const AnsatzSpec& spec) {
  return radial::energy(params, build_ansatz(params, grid, spec)).total;
}

inline ScanResult reduced_scan(const Params& params, const Grid& grid, const ScanConfig& cfg = {}) {
  params.validate();
  if (cfg.samples < 3) throw DomainError("scan needs at least 3 samples");
  const LimitData lim = limit_data(params);
  const double R = grid.R();
  AnsatzSpec spec = AnsatzSpec::make(params.p, R, lim.k2, {}, cfg.alpha, cfg.beta);

  ScanResult out;
  out.R = R;
  out.k2 = lim.k2;
  out.J = lim.J;
  out.alpha = spec.alpha;
  out.beta = spec.beta;
  out.interval = spec.interval();
  const Interval I = out.interval;

  auto phi_at = [&](double rho) {
    AnsatzSpec s = spec;
    s.rho = std::clamp(rho, I.lo, I.hi);
    return reduced_energy(params, grid, s);
  };

  const std::size_t N = cfg.samples;
  std::size_t best = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double rho =
        i + 1 == N ? I.hi : I.lo + I.width() * static_cast<double>(i) / static_cast<double>(N - 1);
    const double phi = phi_at(rho);
    const double model = model_phi(lim.J, lim.k2, R, rho);
    out.rho_grid.push_back(rho);
    out.phi.push_back(phi);
    out.model_phi.push_back(model);
    out.max_relative_error =
        std::max(out.max_relative_error, std::abs(phi - model) / std::abs(model));
    if (phi < out.phi[best]) best = i;
  }

  if (best == 0 || best + 1 == N) {
    out.rho_star = out.rho_grid[best];
    out.phi_star = out.phi[best];
    out.on_boundary = true;
  } else {
    const auto m = roots::golden_section(phi_at, out.rho_grid[best - 1], out.rho_grid[best + 1],
                                         cfg.refine_tol);
    out.rho_star = m.x;
    out.phi_star = m.value;
    if (out.phi[best] < m.value) {
      out.rho_star = out.rho_grid[best];
      out.phi_star = out.phi[best];
    }
    out.on_boundary = out.rho_star - I.lo < cfg.refine_tol || I.hi - out.rho_star < cfg.refine_tol;
  }
  out.model_rho_star = model_minimizer(lim.J, lim.k2, R);
  return out;
}

struct SolveOptions {
  double tol = 1e-8;              // weighted gradient norm
  int max_iter = 20000;           // gradient-descent iterations
  bool newton = true;
  double newton_switch = 1e-3;    // weighted norm below which Newton takes over
  int newton_max_iter = 100;
  int cg_max_iter = 1000;
  double armijo = 1e-4;
  std::optional<Vector> deflation;  // near-null direction (tangent of the ansatz)
  std::optional<double> reference_k;  // k of the reference profile U
};

struct SolveReport {
  RadialField field;
  radial::EnergyReport energy;
  double grad_norm = 0.0;
  int iterations = 0;         // gradient-descent iterations
  int newton_iterations = 0;
  bool converged = false;
  bool positive = false;
  double min_u = 0.0;
  double max_u = 0.0;
  double rho_fit = 0.0;
  double profile_error = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  Vector energy_history;
};

/// Relative size of negative node values tolerated as round-off when
/// judging positivity.
inline constexpr double kPositivityTolerance = 1e-8;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline Vector add(std::span<const double> x, double a, std::span<const double> d) {
  Vector y(x.begin(), x.end());
  axpy(a, d, y);
  y.back() = 0.0;
  return y;
}

// Location of the maximum, refined by a parabola through the three nodes
// around the discrete argmax.
inline double argmax_refined(const Grid& g, std::span<const double> u) {
  const auto it = std::max_element(u.begin(), u.end());
  const auto i = static_cast<std::size_t>(it - u.begin());
  if (i == 0 || i + 1 >= u.size()) return g.r(i);
  const double a = u[i - 1];
  const double b = u[i];
  const double c = u[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return g.r(i);
  return g.r(i) + 0.5 * g.h() * (a - c) / denom;
}

// Newton direction from the Hessian system H d = -g, solved by preconditioned
// CG on the P-orthogonal complement of t plus a scalar step along t.
// Negative curvature truncates CG.
inline Vector newton_direction(const Params& params, const RadialField& x, const Vector& g,
                               const radial::Preconditioner& P, const Vector* t_in,
                               double forcing, int max_iter) {
  const std::size_t N = g.size();
  Vector t;
  Vector Pt;
  if (t_in) {
    t = *t_in;
    t.back() = 0.0;
    Pt = P.apply(t);
    const double nrm = std::sqrt(dot(t, Pt));
    for (double& v : t) v /= nrm;
    for (double& v : Pt) v /= nrm;
  }
  // Projection onto the complement: y - t (Pt . y) keeps the iterate there;
  // residuals are projected with the transpose, r - Pt (t . r).
  auto project_primal = [&](Vector& y) {
    if (!t.empty()) axpy(-dot(Pt, y), t, y);
  };
  auto project_dual = [&](Vector& r) {
    if (!t.empty()) axpy(-dot(t, r), Pt, r);
  };

  Vector d(N, 0.0);
  Vector r(g.begin(), g.end());
  for (double& v : r) v = -v;
  project_dual(r);
  Vector z = P.solve(r);
  project_primal(z);
  Vector s = z;
  double rz = dot(r, z);
  const double r0 = std::sqrt(std::max(rz, 0.0));
  for (int it = 0; it < max_iter && rz > 0.0; ++it) {
    Vector Hs = radial::hessian_apply(params, x, s);
    project_dual(Hs);
    const double curv = dot(s, Hs);
    if (curv <= 0.0) {
      if (it == 0) d = s;
      break;
    }
    const double a = rz / curv;
    axpy(a, s, d);
    axpy(-a, Hs, r);
    z = P.solve(r);
    project_primal(z);
    const double rz_new = dot(r, z);
    if (std::sqrt(std::max(rz_new, 0.0)) <= forcing * r0) break;
    const double b = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < N; ++i) s[i] = z[i] + b * s[i];
  }
  if (!t.empty()) {
    const Vector Ht = radial::hessian_apply(params, x, t);
    const Vector Hd = radial::hessian_apply(params, x, d);
    const double tht = dot(t, Ht);
    const double slope = dot(t, g) + dot(t, Hd);
    // Scalar Newton step when the curvature along t is positive, otherwise a
    // preconditioned gradient step along t.
    const double a = tht > 0.0 ? -slope / tht : -slope;
    axpy(a, t, d);
  }
  d.back() = 0.0;
  return d;
}

}  // namespace detail

inline SolveReport finalize(const Params& params, const RadialField& x, const Vector& g,
                            const SolveOptions& opt, SolveReport rep) {
  const Grid& grid = x.grid();
  const auto& u = x.u();
  rep.energy = radial::energy(params, x);
  rep.grad_norm = radial::weighted_norm(grid, g);
  rep.min_u = *std::min_element(u.begin(), u.end() - 1);
  rep.max_u = *std::max_element(u.begin(), u.end());
  rep.positive = rep.max_u > 0.0 && rep.min_u > -kPositivityTolerance * rep.max_u;
  rep.rho_fit = detail::argmax_refined(grid, u);
  if (opt.reference_k && rep.max_u > 0.0) {
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      if (r < 0.5 * grid.R()) continue;
      err = std::max(err, std::abs(u[i] - soliton::wk(params.p, *opt.reference_k, r - rep.rho_fit)));
    }
    rep.profile_error = err;
  }
  rep.field = x;
  return rep;
}

/// Minimize the discrete energy from `init`: Sobolev-preconditioned gradient
/// descent with Barzilai-Borwein steps and monotone Armijo backtracking, then
/// (optionally) Newton-CG on the Hessian with the deflation direction split off.
inline SolveReport solve(const Params& params, const RadialField& init,
                         const SolveOptions& opt = {}) {
  params.validate();
  require_positive(opt.tol, "tol");
  const Grid& grid = init.grid();
  const radial::Preconditioner P(grid, params.omega);
  SolveReport rep{init, {}, 0.0, 0, 0, false, false, 0.0, 0.0, 0.0,
                  std::numeric_limits<double>::quiet_NaN(), "", {}};

  RadialField x = init;
  double E = radial::energy(params, x).total;
  Vector g = radial::gradient(params, x);
  double gn = radial::weighted_norm(grid, g);
  rep.energy_history.push_back(E);

  Vector prev_x;
  Vector prev_g;
  double step = 1.0;
  // Energy changes below this are round-off.
  auto noise = [&](double e) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e)); };

  // Gradient phase.
  while (gn >= opt.tol && !(opt.newton && gn < opt.newton_switch)) {
    if (rep.iterations >= opt.max_iter) {
      rep.status = "max-iterations";
      return finalize(params, x, g, opt, rep);
    }
    ++rep.iterations;
    Vector d = P.solve(g);
    for (double& v : d) v = -v;
    const double slope = detail::dot(g, d);
    if (!prev_x.empty()) {
      Vector s(x.u());
      Vector y(g);
      detail::axpy(-1.0, prev_x, s);
      detail::axpy(-1.0, prev_g, y);
      const Vector Ps = P.apply(s);
      const double sy = detail::dot(s, y);
      if (sy > 0.0) step = std::clamp(detail::dot(s, Ps) / sy, 1e-6, 1e6);
    }
    double a = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      RadialField trial(grid, detail::add(x.u(), a, d));
      const double Et = radial::energy(params, trial).total;
      if (Et <= E + opt.armijo * a * slope && Et < E) {
        prev_x = x.u();
        prev_g = g;
        x = std::move(trial);
        E = Et;
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      if (opt.newton) break;  // let Newton try from here
      rep.status = "line-search failure";
      return finalize(params, x, g, opt, rep);
    }
    g = radial::gradient(params, x);
    gn = radial::weighted_norm(grid, g);
    rep.energy_history.push_back(E);
  }

  // Newton phase.
  if (opt.newton) {
    const Vector* t = opt.deflation ? &*opt.deflation : nullptr;
    while (gn >= opt.tol) {
      if (rep.newton_iterations >= opt.newton_max_iter) {
        rep.status = "max-iterations";
        return finalize(params, x, g, opt, rep);
      }
      ++rep.newton_iterations;
      const double forcing = std::min(0.1, std::sqrt(gn));
      Vector d = detail::newton_direction(params, x, g, P, t, forcing, opt.cg_max_iter);
      double slope = detail::dot(g, d);
      if (!(slope < 0.0)) {
        d = P.solve(g);
        for (double& v : d) v = -v;
        slope = detail::dot(g, d);
      }
      double a = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        RadialField trial(grid, detail::add(x.u(), a, d));
        const double Et = radial::energy(params, trial).total;
        bool ok = Et <= E + opt.armijo * a * slope;
        Vector gt;
        if (!ok && std::abs(Et - E) <= noise(E)) {
          // Energy differences are at round-off: fall back to the gradient norm.
          gt = radial::gradient(params, trial);
          ok = radial::weighted_norm(grid, gt) < gn;
        }
        if (ok) {
          x = std::move(trial);
          E = Et;
          g = gt.empty() ? radial::gradient(params, x) : std::move(gt);
          gn = radial::weighted_norm(grid, g);
          accepted = true;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) {
        rep.status = "line-search failure";
        return finalize(params, x, g, opt, rep);
      }
      rep.energy_history.push_back(E);
    }
  }

  if (gn >= opt.tol) {
    rep.status = "line-search failure";
    return finalize(params, x, g, opt, rep);
  }
  rep.converged = true;
  rep.status = "converged";
  return finalize(params, x, g, opt, rep);
}

/// Ansatz at the reduced-scan minimizer followed by the full solve, with the
/// tangent direction used for deflation.
struct Pipeline {
  ScanResult scan;
  SolveReport solve;
};

inline Pipeline scan_and_solve(const Params& params, const Grid& grid, const ScanConfig& cfg = {},
                               SolveOptions opt = {}) {
  ScanResult scan = reduced_scan(params, grid, cfg);
  const AnsatzSpec spec =
      AnsatzSpec::make(params.p, grid.R(), scan.k2, scan.rho_star, scan.alpha, scan.beta);
  const RadialField init = build_ansatz(params, grid, spec);
  opt.deflation = tangent_direction(params, grid, spec).u();
  opt.reference_k = scan.k2;
  SolveReport rep = solve(params, init, opt);
  return {std::move(scan), std::move(rep)};
}

struct SweepSpec {
  std::vector<double> p;
  std::vector<double> omega;
  std::vector<double> radius;
  double nodes_per_unit = 40.0;
  bool run_solve = false;
  ScanConfig scan;
  SolveOptions solve;
};

struct SweepCell {
  double p = 0.0;
  double omega = 0.0;
  double R = 0.0;
  bool ok = false;
  std::string error;
  std::optional<ScanResult> scan;
  std::optional<SolveReport> solve;
};

/// Worker count: hardware concurrency, capped by CSSBALL_THREADS when set.
inline std::size_t sweep_threads(std::size_t cells) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CSSBALL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, cells));
}

/// Every (p, omega, R) cell is scanned (and solved, when requested) on its
/// default grid. Cells are independent; failures are recorded per cell.
/// Output order is p-major, then omega, then R.
inline std::vector<SweepCell> sweep(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (double p : spec.p) {
    for (double omega : spec.omega) {
      for (double R : spec.radius) cells.push_back({p, omega, R, false, "", {}, {}});
    }
  }
  if (cells.empty()) return cells;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& c = cells[i];
      try {
        const Params params{c.p, c.omega};
        params.validate();
        const Grid grid = radial::default_grid(c.R, spec.nodes_per_unit);
        if (spec.run_solve) {
          auto result = scan_and_solve(params, grid, spec.scan, spec.solve);
          c.scan = std::move(result.scan);
          c.solve = std::move(result.solve);
        } else {
          c.scan = reduced_scan(params, grid, spec.scan);
        }
        c.ok = true;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const std::size_t nthreads = sweep_threads(cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return cells;
}

}  // namespace cssball::driver
