#include "lattice/models/gaussian_summary.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

void GaussianSummary::validate() const {
  const auto d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d) {
    throw DimensionError("gaussian summary: covariance shape does not match mean");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalError("gaussian summary: covariance is not symmetric");
  }
  if (d == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::abs(covariance.trace())) {
    throw NumericalError("gaussian summary: covariance is not positive semidefinite");
  }
}

}  // namespace lattice
