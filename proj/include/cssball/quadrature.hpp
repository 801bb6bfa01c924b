#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cssball/errors.hpp"

namespace cssball::quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the three-term Legendre recurrence.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double kk = static_cast<double>(k);
          const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }
};

/// Composite Gauss-Legendre rule with `panels` equal panels on [a, b].
template <typename F>
double integrate_panels(F&& f, double a, double b, std::size_t panels) {
  const auto& rule = GaussLegendre<20>::instance();
  const double width = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + width * static_cast<double>(k);
    const double mid = lo + 0.5 * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    }
    sum += 0.5 * width * panel;
  }
  return sum;
}

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// Doubles the panel count until two successive composite estimates agree to
/// `tol` (relative to max(1, |I|)). Throws NumericalError when `max_panels`
/// is exceeded, carrying the last achieved difference.
template <typename F>
Result integrate(F&& f, double a, double b, double tol,
                 std::size_t max_panels = 1u << 14) {
  std::size_t panels = 8;
  double coarse = integrate_panels(f, a, b, panels);
  while (true) {
    const std::size_t finer_panels = 2 * panels;
    const double fine = integrate_panels(f, a, b, finer_panels);
    const double diff = std::abs(fine - coarse);
    if (diff <= tol * std::max(1.0, std::abs(fine))) {
      return {fine, diff, finer_panels};
    }
    if (finer_panels >= max_panels) {
      throw NumericalError("quadrature did not converge", diff);
    }
    panels = finer_panels;
    coarse = fine;
  }
}

/// Trapezoid weights for `count` equally spaced nodes with spacing h.
inline std::vector<double> trapezoid_weights(std::size_t count, double h) {
  std::vector<double> w(count, h);
  if (count > 0) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

/// Running trapezoid integral: out[0] = 0, out[i] = int_{x_0}^{x_i} f.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  }
  return out;
}

/// Reverse running trapezoid integral: out[last] = 0, out[i] = int_{x_i}^{x_last} f.
inline std::vector<double> reverse_cumulative_trapezoid(std::span<const double> f,
                                                        double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = f.size(); i-- > 1;) {
    out[i - 1] = out[i] + 0.5 * h * (f[i - 1] + f[i]);
  }
  return out;
}

}  // namespace cssball::quadrature
