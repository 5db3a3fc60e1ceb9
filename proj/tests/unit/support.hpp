#pragma once

#include "neumann/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(NEUMANN_DATA_DIR) + "/" + name; }

/// Central differences of the value (for gradients) or of the analytic gradient (for Hessians).
inline neumann::Vec2 fd_gradient(const neumann::ScalarField& f, const neumann::Point& p, double h) {
  const neumann::Vec2 ex(h, 0), ey(0, h);
  return {(f.value_unchecked(p + ex) - f.value_unchecked(p - ex)) / (2 * h),
          (f.value_unchecked(p + ey) - f.value_unchecked(p - ey)) / (2 * h)};
}

inline neumann::Mat2 fd_hessian(const neumann::ScalarField& f, const neumann::Point& p, double h) {
  const neumann::Vec2 ex(h, 0), ey(0, h);
  neumann::Mat2 m;
  m.col(0) = (f.gradient_unchecked(p + ex) - f.gradient_unchecked(p - ex)) / (2 * h);
  m.col(1) = (f.gradient_unchecked(p + ey) - f.gradient_unchecked(p - ey)) / (2 * h);
  return m;
}

}  // namespace testing_support
