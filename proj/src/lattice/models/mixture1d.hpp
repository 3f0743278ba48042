#pragma once

#include <vector>

#include "lattice/models/target_model.hpp"
#include "lattice/noise/noise_spec.hpp"

namespace lattice {

/// Univariate Gaussian mixture target. It has no data terms: the whole
/// density is carried by the "prior", so U(x) = -log sum_k w_k N(x; mu_k, s_k^2).
///
/// `noise` describes the synthetic corruption applied to the exact gradient
/// in the heavy-tailed experiment; it does not affect the density.
class Mixture1DModel final : public TargetModel {
 public:
  Mixture1DModel(std::vector<double> weights, std::vector<double> means, std::vector<double> stds,
                 NoiseSpec noise = {});

  /// Three components, weights (0.3, 0.4, 0.3), means (-4, 0, 4), stds 0.8.
  static Mixture1DModel default_target(NoiseSpec noise = {});

  std::size_t dim() const override { return 1; }
  std::size_t num_data() const override { return 0; }

  double log_prior(const ParamVector& theta) const override { return log_density(theta[0]); }
  void add_prior_gradient(const ParamVector& theta, ParamVector& acc) const override;
  double datum_log_likelihood(const ParamVector&, std::size_t) const override { return 0.0; }
  void add_datum_gradient(const ParamVector&, std::size_t, double, ParamVector&) const override {}

  double log_density(double x) const;
  double density(double x) const;
  /// d/dx of -log p(x), evaluated through normalized responsibilities.
  double potential_gradient(double x) const;

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stds() const noexcept { return stds_; }
  const NoiseSpec& noise() const noexcept { return noise_; }

 private:
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> stds_;
  NoiseSpec noise_;
};

double mixture1d_gradient(const Mixture1DModel& model, double x);

}  // namespace lattice
