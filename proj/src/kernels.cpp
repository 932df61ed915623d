#include "navslip/kernels.hpp"

#include <omp.h>

namespace navslip::kernels {

void cross_gram(const Eigen::MatrixXd& L, const Eigen::MatrixXd& R, Eigen::MatrixXd& out, Exec exec) {
  const Eigen::Index n = L.cols(), m = R.cols();
  out.resize(n, m);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) out(i, j) = L.col(i).dot(R.col(j));
  } else {
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) out(i, j) = L.col(i).dot(R.col(j));
  }
}

void gram(const Eigen::MatrixXd& L, Eigen::MatrixXd& out, Exec exec) {
  const Eigen::Index n = L.cols();
  out.resize(n, n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i) out(i, j) = L.col(i).dot(L.col(j));
  } else {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i) out(i, j) = L.col(i).dot(L.col(j));
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) out(j, i) = out(i, j);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace navslip::kernels
