#pragma once

#include <cmath>
#include <string>

#include "cssball/errors.hpp"

namespace cssball {

inline void require_exponent(double p) {
  if (!(p > 1.0 && p < 3.0)) {
    throw DomainError("p outside (1,3): p = " + std::to_string(p));
  }
}

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

/// Nonlinearity exponent and frequency of the stationary problem.
struct Params {
  double p = 2.0;
  double omega = 0.05;

  void validate() const {
    require_exponent(p);
    require_positive(omega, "omega");
  }
};

}  // namespace cssball
