#pragma once

#include "lattice/core/types.hpp"

namespace lattice {

/// Mean vector and symmetric positive-semidefinite covariance.
struct GaussianSummary {
  ParamVector mean;
  Matrix covariance;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  /// Throws DimensionError on shape mismatch, NumericalError if the covariance
  /// is asymmetric beyond 1e-10 relative or has eigenvalues below -1e-10 * trace.
  void validate() const;
};

}  // namespace lattice
