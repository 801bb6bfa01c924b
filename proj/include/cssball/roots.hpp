#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "cssball/errors.hpp"

namespace cssball::roots {

struct Root {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Safeguarded Newton iteration inside a sign-changing bracket [lo, hi].
/// A Newton step that leaves the bracket, or does not halve the residual,
/// is replaced by bisection.
template <typename F, typename DF>
Root newton_bisect(F&& f, DF&& df, double lo, double hi, double xtol = 1e-15,
                   int max_iter = 500) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("newton_bisect: bracket does not change sign");
  }
  if (flo > 0.0) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  // invariant: f(lo) < 0 < f(hi)
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 1; it <= max_iter; ++it) {
    if (fx == 0.0) return {x, 0.0, it};
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    const bool inside = (next - lo) * (next - hi) < 0.0;
    if (!inside) next = 0.5 * (lo + hi);
    double fnext = f(next);
    if (inside && std::abs(fnext) > 0.5 * std::abs(fx)) {
      next = 0.5 * (lo + hi);
      fnext = f(next);
    }
    const double step = std::abs(next - x);
    x = next;
    fx = fnext;
    if (step <= xtol * std::max(1.0, std::abs(x)) || std::abs(hi - lo) <= xtol * std::max(1.0, std::abs(x))) {
      return {x, std::abs(fx), it};
    }
  }
  return {x, std::abs(fx), max_iter};
}

/// Plain bisection on a sign-changing bracket.
template <typename F>
Root bisect(F&& f, double lo, double hi, double xtol, int max_iter = 400) {
  double flo = f(lo);
  if ((flo > 0.0) == (f(hi) > 0.0)) {
    throw DomainError("bisect: bracket does not change sign");
  }
  int it = 0;
  while (std::abs(hi - lo) > xtol && it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    ++it;
  }
  const double x = 0.5 * (lo + hi);
  return {x, std::abs(f(x)), it};
}

struct Minimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal function on [a, b].
template <typename F>
Minimum golden_section(F&& f, double a, double b, double xtol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (std::abs(b - a) > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? Minimum{c, fc, evals} : Minimum{d, fd, evals};
}

}  // namespace cssball::roots
