#include "lattice/diagnostics/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

GaussianSummary empirical_gaussian_fit(const RowMatrix& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (n < 2) throw InvalidArgument("gaussian fit: need at least 2 samples");
  if (d == 0) throw InvalidArgument("gaussian fit: samples have no columns");

  GaussianSummary fit;
  fit.mean = samples.colwise().mean().transpose();
  const RowMatrix centered = samples.rowwise() - fit.mean.transpose();
  fit.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();

  const double trace = fit.covariance.trace();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.covariance, Eigen::EigenvaluesOnly);
  const double mean_diag = trace / static_cast<double>(d);
  if (trace <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * mean_diag) {
    const double jitter = trace > 0.0 ? 1e-10 * mean_diag : 1e-10;
    fit.covariance.diagonal().array() += jitter;
  }
  return fit;
}

double gaussian_kl(const GaussianSummary& p, const GaussianSummary& q) {
  const auto d = p.mean.size();
  if (q.mean.size() != d || p.covariance.rows() != d || p.covariance.cols() != d || q.covariance.rows() != d ||
      q.covariance.cols() != d) {
    throw DimensionError("gaussian_kl: dimension mismatch");
  }
  Eigen::LLT<Matrix> q_chol(q.covariance);
  if (q_chol.info() != Eigen::Success) throw NumericalError("gaussian_kl: q covariance is not invertible");
  Eigen::LLT<Matrix> p_chol(p.covariance);
  if (p_chol.info() != Eigen::Success) throw NumericalError("gaussian_kl: p covariance is not positive definite");

  const Matrix q_inv_p = q_chol.solve(p.covariance);
  const ParamVector diff = q.mean - p.mean;
  const double mahalanobis = diff.dot(q_chol.solve(diff));
  const double logdet_q = 2.0 * q_chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet_p = 2.0 * p_chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double kl = 0.5 * (q_inv_p.trace() - static_cast<double>(d) + mahalanobis + logdet_q - logdet_p);
  return std::max(0.0, kl);
}

double covariance_frobenius_error(const Matrix& est, const Matrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw DimensionError("covariance error: shape mismatch");
  }
  return (est - truth).norm();
}

double covariance_mse(std::span<const Matrix> estimates, const Matrix& truth) {
  if (estimates.empty()) throw InvalidArgument("covariance mse: no estimates");
  double total = 0.0;
  for (const auto& est : estimates) {
    const double err = covariance_frobenius_error(est, truth);
    total += err * err;
  }
  return total / static_cast<double>(estimates.size());
}

}  // namespace lattice
