#pragma once

#include <cstddef>
#include <vector>

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/noise/noise.hpp"
#include "lattice/samplers/step.hpp"

namespace lattice {

/// Second-order minibatch error
///   M = delta^-2 E[ dth_mb dth_mb' - dth_fb dth_fb' | theta, zeta ],
/// where fb uses the exact gradient and mb the gradient plus zeta.
struct MomentErrorTensor {
  Matrix matrix;
};

/// zeta zeta' + g zeta' + zeta g'.
MomentErrorTensor mn_sgld_analytic(const ParamVector& grad, const ParamVector& zeta);
/// The SGLD tensor with its diagonal removed; lattice moves have a fixed squared length.
MomentErrorTensor mn_sglrw_analytic(const ParamVector& grad, const ParamVector& zeta);

struct MatrixEstimate {
  Matrix mean;
  Matrix std_error;
  std::size_t n_samples = 0;
};

struct ScalarEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Monte-Carlo estimate of M from n_samples paired one-step increments.
/// SGLD pairs share the Gaussian xi; SGLRW pairs share one uniform per
/// coordinate (each marginal is still the exact lattice law). Work is split
/// into fixed blocks seeded from `stream` by block index, so the result does
/// not depend on `threads`.
/// Throws NumericalError when sqrt(step/2) |g_i| or sqrt(step/2) |g_i + zeta_i|
/// exceeds 1, where the lattice probabilities would be clipped.
MatrixEstimate mn_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                              const ParamVector& zeta, double step, std::size_t n_samples,
                              const RandomStream& stream, std::size_t threads = 0);

/// Moments of zeta needed by the third-moment formulas.
struct NoiseMoments {
  Matrix covariance;            ///< G
  std::vector<double> third;    ///< E[zeta_i zeta_j zeta_k], row-major d^3; empty means zero
  double third_at(std::size_t i, std::size_t j, std::size_t k) const;
};

/// Closed-form E[dth_i dth_j dth_k | theta] for one step of SGLD or SGLRW
/// (i = j = k, exactly two equal, all distinct; any permutation accepted).
/// Throws InvalidArgument for an index out of range or kind == clipped_sgld.
double third_moment_analytic(SamplerKind kind, const ParamVector& grad, const NoiseMoments& noise, double step,
                             std::size_t i, std::size_t j, std::size_t k);

struct TensorEstimate {
  std::size_t d = 0;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t n_samples = 0;
  /// Fraction of lattice coordinates whose probability had to be clipped.
  double clipped_fraction = 0.0;

  double at(std::size_t i, std::size_t j, std::size_t k) const { return mean[(i * d + j) * d + k]; }
  double se_at(std::size_t i, std::size_t j, std::size_t k) const { return std_error[(i * d + j) * d + k]; }
};

/// Empirical third-moment tensor of one-step increments with zeta drawn from
/// noise_model each sample. Throws NumericalError for SGLRW outside the
/// unclipped regime (|g_i| + 8 sd(zeta_i) beyond sqrt(2/step), or stable noise).
TensorEstimate third_moment_tensor_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                                               const SyntheticNoiseModel& noise_model, double step,
                                               std::size_t n_samples, const RandomStream& stream,
                                               std::size_t threads = 0);

ScalarEstimate third_moment_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                                        const SyntheticNoiseModel& noise_model, double step, std::size_t i,
                                        std::size_t j, std::size_t k, std::size_t n_samples,
                                        const RandomStream& stream, std::size_t threads = 0);

/// s = E[min(xi^2, 1)] = 1 - sqrt(2/pi) exp(-1/2): the factor by which clipping
/// the whole SGLD increment shrinks its limiting diffusion covariance.
double clipped_increment_constant_closed_form();

/// Monte-Carlo estimate of E[min(xi^2, 1)]; n_samples must be at least 1e4.
ScalarEstimate clipped_increment_covariance_constant(std::size_t n_samples, RandomStream& stream);

}  // namespace lattice
