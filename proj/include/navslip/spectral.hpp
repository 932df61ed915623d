#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace navslip::spectral {

/// Chebyshev-Gauss-Lobatto points on [a, b] in increasing order, with the
/// associated differentiation matrix and Clenshaw-Curtis weights.
class ChebyshevGrid {
 public:
  ChebyshevGrid(int n_points, double a, double b);

  int size() const { return static_cast<int>(nodes_.size()); }
  double a() const { return a_; }
  double b() const { return b_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::MatrixXd& diff() const { return diff_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Barycentric interpolation row: values at x = row.dot(nodal values).
  Eigen::RowVectorXd interpolation_row(double x) const;

 private:
  double a_, b_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd bary_;
  Eigen::MatrixXd diff_;
  Eigen::VectorXd weights_;
};

/// Chebyshev coefficients a_m (f = sum_m a_m T_m) of the interpolant through
/// values at the increasing Chebyshev-Gauss-Lobatto points of [-1, 1].
Eigen::VectorXd chebyshev_coefficients(const Eigen::VectorXd& values);

/// T_m(x), T_m'(x), T_m''(x) for m = 0..count-1, x in [-1, 1].
void chebyshev_basis(double x, int count, double* t, double* dt, double* d2t);

/// Coefficients of the antiderivative vanishing at x = -1 (one longer).
Eigen::VectorXd chebyshev_integral(const Eigen::VectorXd& coeffs);

/// Real samples on a uniform periodic grid -> complex Fourier coefficients
/// c_k, k = 0..n/2 such that f(theta) = sum_k Re(c_k e^{ik theta}) * m_k with
/// m_0 = 1 and m_k = 2 otherwise (m_{n/2} = 1 for even n).
std::vector<std::complex<double>> real_fourier(const std::vector<double>& samples);

/// Evaluate a real trigonometric series from real_fourier coefficients.
double eval_real_fourier(const std::vector<std::complex<double>>& coeffs, int n_samples, double theta);

}  // namespace navslip::spectral
