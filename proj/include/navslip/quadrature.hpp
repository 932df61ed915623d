#pragma once

#include <vector>

namespace navslip {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `panels` equal panels of `points` nodes each.
Rule1D composite_gauss(int panels, int points, double a, double b);

/// Composite Gauss-Legendre over consecutive breakpoints (strictly increasing).
Rule1D composite_gauss(const std::vector<double>& breaks, int points);

}  // namespace navslip
