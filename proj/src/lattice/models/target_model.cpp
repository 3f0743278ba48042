#include "lattice/models/target_model.hpp"

#include <string>

#include "lattice/core/error.hpp"

namespace lattice {

void TargetModel::check_params(const ParamVector& theta) const {
  require_dims(static_cast<std::size_t>(theta.size()), dim(), "model parameters");
}

double TargetModel::potential(const ParamVector& theta) const {
  check_params(theta);
  double log_post = log_prior(theta);
  for (std::size_t i = 0; i < num_data(); ++i) log_post += datum_log_likelihood(theta, i);
  return -log_post;
}

ParamVector TargetModel::prior_gradient(const ParamVector& theta) const {
  check_params(theta);
  ParamVector g = ParamVector::Zero(theta.size());
  add_prior_gradient(theta, g);
  return g;
}

ParamVector TargetModel::per_datum_gradient(const ParamVector& theta, std::size_t index) const {
  check_params(theta);
  if (index >= num_data()) {
    throw InvalidArgument("datum index " + std::to_string(index) + " out of range for N=" +
                          std::to_string(num_data()));
  }
  ParamVector g = ParamVector::Zero(theta.size());
  add_datum_gradient(theta, index, 1.0, g);
  return g;
}

ParamVector TargetModel::full_gradient(const ParamVector& theta) const {
  check_params(theta);
  ParamVector g = ParamVector::Zero(theta.size());
  add_prior_gradient(theta, g);
  for (std::size_t i = 0; i < num_data(); ++i) add_datum_gradient(theta, i, 1.0, g);
  return -g;
}

}  // namespace lattice
