#pragma once

#include <cstddef>
#include <vector>

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/noise/noise_spec.hpp"

namespace lattice {

ParamVector sample_gaussian_vector(RandomStream& stream, std::size_t d);

/// One symmetric stable S(alpha, 0, 1, 0) variate (Chambers-Mallows-Stuck).
double sample_standard_stable(RandomStream& stream, double alpha);

/// d i.i.d. draws of S(alpha, 0, scale, 0). Throws InvalidArgument unless the
/// spec is alpha_stable with alpha in (0, 2].
ParamVector sample_alpha_stable(RandomStream& stream, const NoiseSpec& spec, std::size_t d);

/// d i.i.d. draws from the marginal law described by spec (either family).
ParamVector sample_noise(RandomStream& stream, const NoiseSpec& spec, std::size_t d);

/// Uniform size-B subset of {0, ..., N-1} drawn without replacement.
std::vector<std::size_t> draw_minibatch(RandomStream& stream, std::size_t n, std::size_t batch);

/// Reusable without-replacement sampler: a partial Fisher-Yates shuffle over a
/// persistent permutation, O(B) per draw. Each draw is a uniform B-subset
/// whatever order the permutation was left in by earlier draws.
class MinibatchSampler {
 public:
  MinibatchSampler(std::size_t n, std::size_t batch);
  /// View of the B drawn indices, valid until the next call.
  const std::size_t* draw(RandomStream& stream);
  std::size_t size() const noexcept { return batch_; }
  std::size_t population() const noexcept { return perm_.size(); }

 private:
  std::vector<std::size_t> perm_;
  std::size_t batch_;
};

/// Additive gradient noise zeta = L s, with s i.i.d. from `distribution`.
/// For a standard gaussian distribution (scale 1), Cov[zeta] = L L'.
struct SyntheticNoiseModel {
  Matrix covariance_factor;
  NoiseSpec distribution;
};

ParamVector sample_synthetic_noise(RandomStream& stream, const SyntheticNoiseModel& model);

}  // namespace lattice
