#include "lattice/models/logistic.hpp"

#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

double log_sigmoid(double z) noexcept {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticModel::LogisticModel(RowMatrix features, Eigen::VectorXd labels, double prior_precision)
    : features_(std::move(features)), labels_(std::move(labels)), prior_precision_(prior_precision) {
  if (!(prior_precision_ > 0.0)) throw InvalidArgument("logistic model: prior_precision must be positive");
  if (features_.rows() != labels_.size()) {
    throw DimensionError("logistic model: feature rows and labels length differ");
  }
  if (features_.cols() == 0) throw InvalidArgument("logistic model: dimension must be positive");
  if (!features_.allFinite()) throw InvalidArgument("logistic model: features must be finite");
  for (double y : labels_) {
    if (y != 0.0 && y != 1.0) throw InvalidArgument("logistic model: labels must be 0 or 1");
  }
}

double LogisticModel::log_prior(const ParamVector& theta) const {
  return -0.5 * prior_precision_ * theta.squaredNorm();
}

void LogisticModel::add_prior_gradient(const ParamVector& theta, ParamVector& acc) const {
  acc.noalias() -= prior_precision_ * theta;
}

double LogisticModel::datum_log_likelihood(const ParamVector& theta, std::size_t index) const {
  const auto i = static_cast<Eigen::Index>(index);
  const double z = features_.row(i).dot(theta);
  return labels_[i] == 1.0 ? log_sigmoid(z) : log_sigmoid(-z);
}

void LogisticModel::add_datum_gradient(const ParamVector& theta, std::size_t index, double scale,
                                       ParamVector& acc) const {
  const auto i = static_cast<Eigen::Index>(index);
  const auto row = features_.row(i);
  const double residual = labels_[i] - sigmoid(row.dot(theta));
  acc.noalias() += (scale * residual) * row.transpose();
}

LogisticModel make_synthetic_logistic(std::size_t n, std::size_t d, double separation,
                                      double prior_precision, RandomStream& stream) {
  if (n == 0 || d < 2) throw InvalidArgument("synthetic logistic data: need n >= 1 and d >= 2");
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  const double shift = separation / std::sqrt(static_cast<double>(d - 1));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double label = stream.uniform() < 0.5 ? 0.0 : 1.0;
    y[i] = label;
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < x.cols(); ++j) x(i, j) = (2.0 * label - 1.0) * shift + stream.normal();
  }
  return LogisticModel(std::move(x), std::move(y), prior_precision);
}

}  // namespace lattice
