#include "navslip/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace navslip::spectral {

ChebyshevGrid::ChebyshevGrid(int n_points, double a, double b) : a_(a), b_(b) {
  if (n_points < 3) throw std::invalid_argument("ChebyshevGrid: need at least 3 points");
  if (!(b > a)) throw std::invalid_argument("ChebyshevGrid: empty interval");
  const int n = n_points - 1;
  const double pi = std::numbers::pi;
  Eigen::VectorXd t(n_points);  // reference nodes in [-1, 1], increasing
  for (int j = 0; j <= n; ++j) t[j] = -std::cos(pi * j / n);
  nodes_ = (0.5 * (a + b)) + (0.5 * (b - a)) * t.array();

  bary_.resize(n_points);
  for (int j = 0; j <= n; ++j) bary_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);

  // Differentiation matrix from barycentric weights (negative-sum trick on
  // the diagonal).
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = (bary_[j] / bary_[i]) / (t[i] - t[j]);
      row += d(i, j);
    }
    d(i, i) = -row;
  }
  diff_ = d * (2.0 / (b - a));

  // Clenshaw-Curtis weights.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_points);
  for (int j = 0; j <= n; ++j) {
    const double theta = pi * j / n;
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      const double bk = (k == n / 2 && n % 2 == 0) ? 1.0 : 2.0;
      s += bk * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    const double cj = (j == 0 || j == n) ? 1.0 : 2.0;
    w[j] = cj / n * (1.0 - s);
  }
  weights_ = w * (0.5 * (b - a));
}

Eigen::RowVectorXd ChebyshevGrid::interpolation_row(double x) const {
  const int m = size();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
  double denom = 0.0;
  for (int j = 0; j < m; ++j) {
    const double dx = x - nodes_[j];
    if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) {
      row.setZero();
      row[j] = 1.0;
      return row;
    }
    row[j] = bary_[j] / dx;
    denom += row[j];
  }
  return row / denom;
}

Eigen::VectorXd chebyshev_coefficients(const Eigen::VectorXd& values) {
  const int m = static_cast<int>(values.size());
  const int n = m - 1;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      // increasing nodes: x_j = -cos(pi j / n) = cos(pi (n - j) / n)
      const double c = (j == 0 || j == n) ? 0.5 : 1.0;
      s += c * values[j] * std::cos(std::numbers::pi * k * (n - j) / n);
    }
    a[k] = 2.0 * s / n;
  }
  a[0] *= 0.5;
  a[n] *= 0.5;
  return a;
}

void chebyshev_basis(double x, int count, double* t, double* dt, double* d2t) {
  if (count <= 0) return;
  t[0] = 1.0;
  dt[0] = 0.0;
  d2t[0] = 0.0;
  if (count == 1) return;
  t[1] = x;
  dt[1] = 1.0;
  d2t[1] = 0.0;
  for (int m = 1; m + 1 < count; ++m) {
    t[m + 1] = 2.0 * x * t[m] - t[m - 1];
    dt[m + 1] = 2.0 * t[m] + 2.0 * x * dt[m] - dt[m - 1];
    d2t[m + 1] = 4.0 * dt[m] + 2.0 * x * d2t[m] - d2t[m - 1];
  }
}

Eigen::VectorXd chebyshev_integral(const Eigen::VectorXd& a) {
  const int m = static_cast<int>(a.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  for (int k = 0; k < m; ++k) {
    if (k == 0) {
      b[1] += a[0];
    } else if (k == 1) {
      b[2] += 0.25 * a[1];
    } else {
      b[k + 1] += a[k] / (2.0 * (k + 1));
      b[k - 1] -= a[k] / (2.0 * (k - 1));
    }
  }
  double at_minus_one = 0.0;
  for (int k = 0; k <= m; ++k) at_minus_one += b[k] * ((k % 2) ? -1.0 : 1.0);
  b[0] -= at_minus_one;
  return b;
}

std::vector<std::complex<double>> real_fourier(const std::vector<double>& samples) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, samples);
  const int n = static_cast<int>(samples.size());
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) out[k] = spectrum[k] / static_cast<double>(n);
  return out;
}

double eval_real_fourier(const std::vector<std::complex<double>>& coeffs, int n_samples, double theta) {
  double v = coeffs[0].real();
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    const double m = (static_cast<int>(2 * k) == n_samples) ? 1.0 : 2.0;
    v += m * (coeffs[k] * std::polar(1.0, static_cast<double>(k) * theta)).real();
  }
  return v;
}

}  // namespace navslip::spectral
