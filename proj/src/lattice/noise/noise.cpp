#include "lattice/noise/noise.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "lattice/core/error.hpp"

namespace lattice {

void NoiseSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("noise spec: scale must be positive");
  if (family == NoiseFamily::alpha_stable && !(alpha > 0.0 && alpha <= 2.0)) {
    throw InvalidArgument("noise spec: alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
}

ParamVector sample_gaussian_vector(RandomStream& stream, std::size_t d) {
  ParamVector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = stream.normal();
  return v;
}

double sample_standard_stable(RandomStream& stream, double alpha) {
  const double v = std::numbers::pi * (stream.uniform_open() - 0.5);  // U(-pi/2, pi/2)
  if (std::abs(alpha - 1.0) < 1e-9) return std::tan(v);
  double w = stream.exponential();
  while (w == 0.0) w = stream.exponential();
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

ParamVector sample_alpha_stable(RandomStream& stream, const NoiseSpec& spec, std::size_t d) {
  if (spec.family != NoiseFamily::alpha_stable) throw InvalidArgument("sample_alpha_stable: spec family is not alpha_stable");
  spec.validate();
  ParamVector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = spec.scale * sample_standard_stable(stream, spec.alpha);
  return v;
}

ParamVector sample_noise(RandomStream& stream, const NoiseSpec& spec, std::size_t d) {
  if (spec.family == NoiseFamily::alpha_stable) return sample_alpha_stable(stream, spec, d);
  spec.validate();
  ParamVector v = sample_gaussian_vector(stream, d);
  return spec.scale * v;
}

MinibatchSampler::MinibatchSampler(std::size_t n, std::size_t batch) : perm_(n), batch_(batch) {
  if (batch == 0) throw InvalidArgument("minibatch: batch size must be positive");
  if (batch > n) {
    throw InvalidArgument("minibatch: batch size " + std::to_string(batch) + " exceeds dataset size " + std::to_string(n));
  }
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
}

const std::size_t* MinibatchSampler::draw(RandomStream& stream) {
  const std::size_t n = perm_.size();
  if (batch_ < n) {
    for (std::size_t i = 0; i < batch_; ++i) {
      const std::size_t j = i + stream.index(n - i);
      std::swap(perm_[i], perm_[j]);
    }
  }
  return perm_.data();
}

std::vector<std::size_t> draw_minibatch(RandomStream& stream, std::size_t n, std::size_t batch) {
  MinibatchSampler sampler(n, batch);
  const std::size_t* idx = sampler.draw(stream);
  return {idx, idx + batch};
}

ParamVector sample_synthetic_noise(RandomStream& stream, const SyntheticNoiseModel& model) {
  const auto d = static_cast<std::size_t>(model.covariance_factor.cols());
  const ParamVector s = sample_noise(stream, model.distribution, d);
  return model.covariance_factor * s;
}

}  // namespace lattice
