#include "lattice/models/quadratic.hpp"

#include <Eigen/Cholesky>

#include "lattice/core/error.hpp"

namespace lattice {

QuadraticModel::QuadraticModel(Matrix precision, ParamVector center)
    : precision_(std::move(precision)), center_(std::move(center)) {
  if (precision_.rows() != center_.size() || precision_.cols() != center_.size()) {
    throw DimensionError("quadratic model: precision shape does not match center");
  }
  if (center_.size() == 0) throw InvalidArgument("quadratic model: dimension must be positive");
  if (!precision_.isApprox(precision_.transpose())) throw InvalidArgument("quadratic model: precision must be symmetric");
  if (Eigen::LLT<Matrix>(precision_).info() != Eigen::Success) {
    throw InvalidArgument("quadratic model: precision must be positive definite");
  }
}

double QuadraticModel::log_prior(const ParamVector& theta) const {
  const ParamVector r = theta - center_;
  return -0.5 * r.dot(precision_ * r);
}

void QuadraticModel::add_prior_gradient(const ParamVector& theta, ParamVector& acc) const {
  acc.noalias() -= precision_ * (theta - center_);
}

}  // namespace lattice
