#pragma once

#include <span>

#include "lattice/core/types.hpp"
#include "lattice/models/gaussian_summary.hpp"

namespace lattice {

/// Sample mean and unbiased (n - 1) covariance of the rows of `samples`.
/// When the covariance is numerically singular (smallest eigenvalue at most
/// 1e-12 times the mean diagonal, or a zero trace) the diagonal gets a jitter
/// of 1e-10 * trace / d (1e-10 when the trace is zero).
/// Throws InvalidArgument for fewer than two samples.
GaussianSummary empirical_gaussian_fit(const RowMatrix& samples);

/// KL(p || q) between Gaussians. Throws NumericalError if either covariance is
/// not positive definite, DimensionError on mismatched dimensions. The result
/// is clamped at zero against round-off.
double gaussian_kl(const GaussianSummary& p, const GaussianSummary& q);

/// || est - truth ||_F.
double covariance_frobenius_error(const Matrix& est, const Matrix& truth);

/// Mean over runs of || est_r - truth ||_F^2.
double covariance_mse(std::span<const Matrix> estimates, const Matrix& truth);

}  // namespace lattice
