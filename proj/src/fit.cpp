#include "deltaclose/fit.hpp"

#include <algorithm>

namespace deltaclose {

LeastSquares least_squares(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b, double rank_tol) {
  LeastSquares out;
  const Eigen::Index n = a.cols();
  out.coeffs = Eigen::VectorXcd::Zero(n);
  if (n == 0 || a.rows() == 0) {
    out.max_residual = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
    return out;
  }
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = a.col(j).norm();
    scale(j) = norm > 0.0 ? 1.0 / norm : 1.0;
  }
  const Eigen::MatrixXcd scaled = a * scale.asDiagonal();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
  cod.setThreshold(rank_tol);
  cod.compute(scaled);
  out.rank = static_cast<std::size_t>(cod.rank());
  if (out.rank > 0) {
    const auto& r = cod.matrixQTZ();
    double big = 0.0, small = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(out.rank); ++i) {
      big = std::max(big, std::abs(r(i, i)));
      small = std::min(small, std::abs(r(i, i)));
    }
    out.condition = small > 0.0 ? big / small : std::numeric_limits<double>::infinity();
    out.coeffs = scale.asDiagonal() * cod.solve(b);
  }
  out.max_residual = (a * out.coeffs - b).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace deltaclose
