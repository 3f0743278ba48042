#include "lattice/models/linear_gaussian.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

LinearGaussianModel::LinearGaussianModel(RowMatrix design, Eigen::VectorXd targets,
                                         double noise_variance, double prior_precision)
    : design_(std::move(design)),
      targets_(std::move(targets)),
      noise_variance_(noise_variance),
      prior_precision_(prior_precision) {
  if (!(noise_variance_ > 0.0)) throw InvalidArgument("linear model: noise_variance must be positive");
  if (!(prior_precision_ > 0.0)) throw InvalidArgument("linear model: prior_precision must be positive");
  if (design_.rows() != targets_.size()) {
    throw DimensionError("linear model: design rows and targets length differ");
  }
  if (design_.cols() == 0) throw InvalidArgument("linear model: dimension must be positive");
  if (!design_.allFinite() || !targets_.allFinite()) {
    throw InvalidArgument("linear model: data must be finite");
  }
}

double LinearGaussianModel::log_prior(const ParamVector& theta) const {
  return -0.5 * prior_precision_ * theta.squaredNorm();
}

void LinearGaussianModel::add_prior_gradient(const ParamVector& theta, ParamVector& acc) const {
  acc.noalias() -= prior_precision_ * theta;
}

double LinearGaussianModel::datum_log_likelihood(const ParamVector& theta, std::size_t index) const {
  const double r = targets_[static_cast<Eigen::Index>(index)] -
                   design_.row(static_cast<Eigen::Index>(index)).dot(theta);
  return -0.5 * r * r / noise_variance_;
}

void LinearGaussianModel::add_datum_gradient(const ParamVector& theta, std::size_t index,
                                             double scale, ParamVector& acc) const {
  const auto row = design_.row(static_cast<Eigen::Index>(index));
  const double r = targets_[static_cast<Eigen::Index>(index)] - row.dot(theta);
  acc.noalias() += (scale * r / noise_variance_) * row.transpose();
}

GaussianSummary linreg_analytic_posterior(const LinearGaussianModel& model) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  const Matrix x = model.design();
  Matrix precision = x.transpose() * x / model.noise_variance();
  precision.diagonal().array() += model.prior_precision();
  const Eigen::VectorXd rhs = x.transpose() * model.targets() / model.noise_variance();

  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("linear posterior: precision not positive definite");
  GaussianSummary post;
  post.mean = llt.solve(rhs);
  post.covariance = llt.solve(Matrix::Identity(d, d));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();

  const double residual = (precision * post.mean - rhs).norm();
  if (residual > 1e-8 * std::max(1.0, rhs.norm())) {
    throw NumericalError("linear posterior: solve residual " + std::to_string(residual) + " too large");
  }
  return post;
}

SyntheticLinearData make_synthetic_linear(std::size_t n, std::size_t d, double noise_variance,
                                          double prior_precision, RandomStream& stream, double feature_scale) {
  if (n == 0 || d == 0) throw InvalidArgument("synthetic linear data: n and d must be positive");
  if (!(feature_scale > 0.0) || !std::isfinite(feature_scale)) {
    throw InvalidArgument("synthetic linear data: feature_scale must be positive");
  }
  if (!(noise_variance > 0.0)) throw InvalidArgument("synthetic linear data: noise_variance must be positive");
  ParamVector truth(static_cast<Eigen::Index>(d));
  for (auto& v : truth) v = stream.normal();
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = feature_scale * stream.normal();
  const double noise_sd = std::sqrt(noise_variance);
  Eigen::VectorXd y = x * truth;
  for (auto& v : y) v += noise_sd * stream.normal();
  return {LinearGaussianModel(std::move(x), std::move(y), noise_variance, prior_precision), truth};
}

}  // namespace lattice
