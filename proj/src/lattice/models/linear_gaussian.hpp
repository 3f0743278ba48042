#pragma once

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/models/gaussian_summary.hpp"
#include "lattice/models/target_model.hpp"

namespace lattice {

/// y = X theta + eps, eps ~ N(0, noise_variance I), prior theta ~ N(0, I / prior_precision).
class LinearGaussianModel final : public TargetModel {
 public:
  LinearGaussianModel(RowMatrix design, Eigen::VectorXd targets, double noise_variance,
                      double prior_precision);

  std::size_t dim() const override { return static_cast<std::size_t>(design_.cols()); }
  std::size_t num_data() const override { return static_cast<std::size_t>(design_.rows()); }

  double log_prior(const ParamVector& theta) const override;
  void add_prior_gradient(const ParamVector& theta, ParamVector& acc) const override;
  double datum_log_likelihood(const ParamVector& theta, std::size_t index) const override;
  void add_datum_gradient(const ParamVector& theta, std::size_t index, double scale,
                          ParamVector& acc) const override;

  const RowMatrix& design() const noexcept { return design_; }
  const Eigen::VectorXd& targets() const noexcept { return targets_; }
  double noise_variance() const noexcept { return noise_variance_; }
  double prior_precision() const noexcept { return prior_precision_; }

 private:
  RowMatrix design_;
  Eigen::VectorXd targets_;
  double noise_variance_;
  double prior_precision_;
};

/// Closed-form posterior: Sigma^-1 = X'X / s2 + tau I, mu = Sigma X'y / s2.
/// Throws NumericalError if the relative residual of Sigma^-1 mu = X'y / s2 exceeds 1e-8.
GaussianSummary linreg_analytic_posterior(const LinearGaussianModel& model);

struct SyntheticLinearData {
  LinearGaussianModel model;
  ParamVector true_params;
};

/// theta* ~ N(0, I), rows of X ~ N(0, feature_scale^2 I), y = X theta* + N(0, noise_variance).
SyntheticLinearData make_synthetic_linear(std::size_t n, std::size_t d, double noise_variance,
                                          double prior_precision, RandomStream& stream, double feature_scale = 1.0);

}  // namespace lattice
