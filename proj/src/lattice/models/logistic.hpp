#pragma once

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/models/target_model.hpp"

namespace lattice {

/// Bernoulli likelihood p(y = 1 | x, theta) = sigmoid(x' theta) with prior N(0, I / prior_precision).
class LogisticModel final : public TargetModel {
 public:
  LogisticModel(RowMatrix features, Eigen::VectorXd labels, double prior_precision = 1.0);

  std::size_t dim() const override { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_data() const override { return static_cast<std::size_t>(features_.rows()); }

  double log_prior(const ParamVector& theta) const override;
  void add_prior_gradient(const ParamVector& theta, ParamVector& acc) const override;
  double datum_log_likelihood(const ParamVector& theta, std::size_t index) const override;
  void add_datum_gradient(const ParamVector& theta, std::size_t index, double scale,
                          ParamVector& acc) const override;

  const RowMatrix& features() const noexcept { return features_; }
  const Eigen::VectorXd& labels() const noexcept { return labels_; }

 private:
  RowMatrix features_;
  Eigen::VectorXd labels_;
  double prior_precision_;
};

/// log(sigmoid(z)) without overflow for large |z|.
double log_sigmoid(double z) noexcept;
double sigmoid(double z) noexcept;

/// Two Gaussian blobs: label c ~ Bernoulli(1/2), features (2c - 1) * separation / sqrt(k) * 1 + N(0, I)
/// over k = d - 1 columns, plus a leading intercept column of ones.
LogisticModel make_synthetic_logistic(std::size_t n, std::size_t d, double separation,
                                      double prior_precision, RandomStream& stream);

}  // namespace lattice
