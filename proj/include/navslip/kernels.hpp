#pragma once

#include <Eigen/Dense>

namespace navslip {

/// Execution policy for the assembly kernels. Both policies compute every
/// entry with the same summation order, so results are bitwise identical.
enum class Exec { serial, parallel };

namespace kernels {

/// out(i, j) = L.col(i) . R.col(j)
void cross_gram(const Eigen::MatrixXd& L, const Eigen::MatrixXd& R, Eigen::MatrixXd& out, Exec exec);

/// Symmetric variant: out(i, j) = L.col(i) . L.col(j), lower triangle computed and mirrored.
void gram(const Eigen::MatrixXd& L, Eigen::MatrixXd& out, Exec exec);

/// Number of threads the parallel policy will use.
int thread_count();

}  // namespace kernels
}  // namespace navslip
