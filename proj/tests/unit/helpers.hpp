#pragma once

#include <cmath>
#include <random>

#include "navslip/types.hpp"

namespace testing_util {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline navslip::Vec2 uniform2(double a, double b) { return {uniform(a, b), uniform(a, b)}; }

}  // namespace testing_util

namespace testing_util {

/// psi = sin(1.3 x + 0.2) cos(0.7 y - 0.1) + 0.25 x y^2, a smooth stream function.
inline navslip::StreamJet sample_stream(const navslip::Vec2& p) {
  const double x = p.x(), y = p.y();
  const double s = std::sin(1.3 * x + 0.2), c = std::cos(1.3 * x + 0.2);
  const double sy = std::sin(0.7 * y - 0.1), cy = std::cos(0.7 * y - 0.1);
  navslip::StreamJet j;
  j.psi = s * cy + 0.25 * x * y * y;
  j.grad = {1.3 * c * cy + 0.25 * y * y, -0.7 * s * sy + 0.5 * x * y};
  j.hess << -1.69 * s * cy, -0.91 * c * sy + 0.5 * y, -0.91 * c * sy + 0.5 * y, -0.49 * s * cy + 0.5 * x;
  return j;
}

inline navslip::Jet2 sample_flow(const navslip::Vec2& p) {
  const auto s = sample_stream(p);
  return {navslip::velocity_from_stream(s), navslip::velocity_gradient_from_stream(s)};
}

}  // namespace testing_util
