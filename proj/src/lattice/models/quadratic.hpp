#pragma once

#include "lattice/models/target_model.hpp"

namespace lattice {

/// U(theta) = 1/2 (theta - center)' A (theta - center) for symmetric positive definite A.
/// Used by the moment oracles, where a known closed-form gradient is all that matters.
class QuadraticModel final : public TargetModel {
 public:
  QuadraticModel(Matrix precision, ParamVector center);

  std::size_t dim() const override { return static_cast<std::size_t>(center_.size()); }
  std::size_t num_data() const override { return 0; }

  double log_prior(const ParamVector& theta) const override;
  void add_prior_gradient(const ParamVector& theta, ParamVector& acc) const override;
  double datum_log_likelihood(const ParamVector&, std::size_t) const override { return 0.0; }
  void add_datum_gradient(const ParamVector&, std::size_t, double, ParamVector&) const override {}

 private:
  Matrix precision_;
  ParamVector center_;
};

}  // namespace lattice
