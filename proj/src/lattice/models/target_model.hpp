#pragma once

#include <cstddef>

#include "lattice/core/types.hpp"

namespace lattice {

/// A posterior target p(theta | D) proportional to p(theta) * prod_i p(y_i | x_i, theta).
///
/// Subclasses provide the prior and per-datum likelihood terms; the potential
/// U(theta) = -log p(theta) - sum_i log p(y_i | x_i, theta) and its gradient
/// are assembled here so that full_gradient is, by construction, the exact
/// negation of prior gradient plus the per-datum sum. Models without data
/// (N = 0) put the whole target into the prior.
///
/// Models are immutable after construction and safe to share across threads.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t num_data() const = 0;

  virtual double log_prior(const ParamVector& theta) const = 0;
  /// acc += grad log p(theta).
  virtual void add_prior_gradient(const ParamVector& theta, ParamVector& acc) const = 0;

  virtual double datum_log_likelihood(const ParamVector& theta, std::size_t index) const = 0;
  /// acc += scale * grad log p(y_i | x_i, theta). No bounds check.
  virtual void add_datum_gradient(const ParamVector& theta, std::size_t index, double scale,
                                  ParamVector& acc) const = 0;

  /// U(theta).
  double potential(const ParamVector& theta) const;
  /// grad log p(theta).
  ParamVector prior_gradient(const ParamVector& theta) const;
  /// grad log p(y_i | x_i, theta); throws InvalidArgument for an out-of-range index.
  ParamVector per_datum_gradient(const ParamVector& theta, std::size_t index) const;
  /// grad U(theta) over the whole dataset.
  ParamVector full_gradient(const ParamVector& theta) const;

 protected:
  void check_params(const ParamVector& theta) const;
};

}  // namespace lattice
