#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "prefel/numerics.hpp"

namespace prefel {

EigenPair min_eigenpair(const Mat& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("min_eigenpair: matrix must be square");
  if (!h.allFinite()) throw std::invalid_argument("min_eigenpair: non-finite entries");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("min_eigenpair: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("min_eigenpair: eigensolver failed");
  const double lambda = es.eigenvalues()[0];
  if (lambda <= 1e-14 * scale) throw std::invalid_argument("min_eigenpair: matrix is not positive definite");

  Vec u = es.eigenvectors().col(0);
  u.normalize();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12) {
      if (u[i] < 0) u = -u;
      break;
    }
  }
  return {lambda, u};
}

}  // namespace prefel
