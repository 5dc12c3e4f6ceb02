#pragma once

#include <Eigen/Dense>

namespace deltaclose {

struct LeastSquares {
  Eigen::VectorXcd coeffs;
  std::size_t rank = 0;
  double condition = 1.0;  // ratio of extreme kept pivots after column scaling
  double max_residual = 0.0;
};

// Minimum norm solution of min |A c - b| through a complete orthogonal
// decomposition with column pivoting. Columns are scaled to unit norm first;
// pivots below rank_tol times the largest are treated as zero.
LeastSquares least_squares(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b, double rank_tol = 1e-10);

}  // namespace deltaclose
