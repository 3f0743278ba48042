#include "lattice/models/mixture1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lattice/core/error.hpp"

namespace lattice {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

Mixture1DModel::Mixture1DModel(std::vector<double> weights, std::vector<double> means,
                               std::vector<double> stds, NoiseSpec noise)
    : weights_(std::move(weights)), means_(std::move(means)), stds_(std::move(stds)), noise_(noise) {
  if (weights_.empty()) throw InvalidArgument("mixture: need at least one component");
  if (weights_.size() != means_.size() || weights_.size() != stds_.size()) {
    throw InvalidArgument("mixture: weights, means and stds must have equal length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0)) throw InvalidArgument("mixture: weights must be positive");
    if (!(stds_[k] > 0.0)) throw InvalidArgument("mixture: stds must be positive");
    if (!std::isfinite(means_[k])) throw InvalidArgument("mixture: means must be finite");
    total += weights_[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture: weights must sum to 1");
  noise_.validate();
}

Mixture1DModel Mixture1DModel::default_target(NoiseSpec noise) {
  return Mixture1DModel({0.3, 0.4, 0.3}, {-4.0, 0.0, 4.0}, {0.8, 0.8, 0.8}, noise);
}

double Mixture1DModel::log_density(double x) const {
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double z = (x - means_[k]) / stds_[k];
    terms[k] = std::log(weights_[k]) - std::log(stds_[k]) - kLogSqrt2Pi - 0.5 * z * z;
    peak = std::max(peak, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

double Mixture1DModel::density(double x) const { return std::exp(log_density(x)); }

double Mixture1DModel::potential_gradient(double x) const {
  // Responsibilities r_k via log-sum-exp; dU/dx = sum_k r_k (x - mu_k) / s_k^2.
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double z = (x - means_[k]) / stds_[k];
    terms[k] = std::log(weights_[k]) - std::log(stds_[k]) - 0.5 * z * z;
    peak = std::max(peak, terms[k]);
  }
  double norm = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double r = std::exp(terms[k] - peak);
    norm += r;
    weighted += r * (x - means_[k]) / (stds_[k] * stds_[k]);
  }
  return weighted / norm;
}

void Mixture1DModel::add_prior_gradient(const ParamVector& theta, ParamVector& acc) const {
  acc[0] -= potential_gradient(theta[0]);
}

double mixture1d_gradient(const Mixture1DModel& model, double x) { return model.potential_gradient(x); }

}  // namespace lattice
