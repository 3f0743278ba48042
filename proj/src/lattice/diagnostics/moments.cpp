#include "lattice/diagnostics/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lattice/core/error.hpp"
#include "lattice/core/parallel.hpp"

namespace lattice {

namespace {

constexpr std::size_t kBlockSize = std::size_t{1} << 16;

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }
std::size_t block_length(std::size_t n, std::size_t b) { return std::min(kBlockSize, n - b * kBlockSize); }

void check_same_dims(const ParamVector& a, const ParamVector& b, const char* what) {
  require_dims(static_cast<std::size_t>(b.size()), static_cast<std::size_t>(a.size()), what);
  if (a.size() == 0) throw InvalidArgument(std::string(what) + ": empty vectors");
}

void check_moment_kind(SamplerKind kind) {
  if (kind == SamplerKind::clipped_sgld) throw InvalidArgument("moment oracles support sgld and sglrw only");
}

/// Per-entry first and second sums over a block, combined in block order.
struct Sums {
  std::vector<double> s1;
  std::vector<double> s2;
  std::size_t clipped = 0;

  explicit Sums(std::size_t m = 0) : s1(m, 0.0), s2(m, 0.0) {}
  void add(std::size_t e, double v) {
    s1[e] += v;
    s2[e] += v * v;
  }
  void merge(const Sums& o) {
    for (std::size_t e = 0; e < s1.size(); ++e) {
      s1[e] += o.s1[e];
      s2[e] += o.s2[e];
    }
    clipped += o.clipped;
  }
};

template <class BlockFn>
Sums run_blocks(std::size_t n, std::size_t entries, const RandomStream& stream, std::size_t threads, BlockFn&& fn) {
  const std::size_t blocks = block_count(n);
  std::vector<Sums> partial(blocks, Sums(entries));
  parallel_for(blocks, threads, [&](std::size_t b) {
    RandomStream block_stream = stream.split(b);
    fn(block_stream, block_length(n, b), partial[b]);
  });
  Sums total(entries);
  for (const auto& p : partial) total.merge(p);
  return total;
}

void finish(const Sums& sums, std::size_t n, std::size_t e, double& mean, double& se) {
  const double nn = static_cast<double>(n);
  mean = sums.s1[e] / nn;
  const double var = std::max(0.0, (sums.s2[e] / nn - mean * mean) * nn / (nn - 1.0));
  se = std::sqrt(var / nn);
}

}  // namespace

MomentErrorTensor mn_sgld_analytic(const ParamVector& grad, const ParamVector& zeta) {
  check_same_dims(grad, zeta, "mn_sgld_analytic");
  const Eigen::Index d = grad.size();
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) m(i, j) = m(j, i) = zeta[i] * zeta[j] + grad[i] * zeta[j] + zeta[i] * grad[j];
  return {m};
}

MomentErrorTensor mn_sglrw_analytic(const ParamVector& grad, const ParamVector& zeta) {
  auto m = mn_sgld_analytic(grad, zeta);
  m.matrix.diagonal().setZero();
  return m;
}

MatrixEstimate mn_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                              const ParamVector& zeta, double step, std::size_t n_samples,
                              const RandomStream& stream, std::size_t threads) {
  check_moment_kind(kind);
  check_same_dims(grad, zeta, "mn_monte_carlo");
  require_dims(static_cast<std::size_t>(theta.size()), static_cast<std::size_t>(grad.size()), "mn_monte_carlo theta");
  if (!(step > 0.0)) throw InvalidArgument("mn_monte_carlo: step must be positive");
  if (n_samples < 2) throw InvalidArgument("mn_monte_carlo: need at least 2 samples");
  const double a_scale = std::sqrt(step / 2.0);
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (a_scale * std::abs(grad[i]) > 1.0 || a_scale * std::abs(grad[i] + zeta[i]) > 1.0) {
      throw NumericalError("mn_monte_carlo: lattice probabilities would be clipped at coordinate " + std::to_string(i));
    }
  }

  const auto d = static_cast<std::size_t>(grad.size());
  const double h = std::sqrt(2.0 * step);
  const double inv_step2 = 1.0 / (step * step);
  ParamVector p_plus_fb(grad.size());
  ParamVector p_plus_mb(grad.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    p_plus_fb[i] = lrw_transition_prob(grad[i], step).p_plus;
    p_plus_mb[i] = lrw_transition_prob(grad[i] + zeta[i], step).p_plus;
  }

  const Sums sums = run_blocks(n_samples, d * d, stream, threads, [&](RandomStream& rs, std::size_t len, Sums& acc) {
    std::vector<double> fb(d);
    std::vector<double> mb(d);
    for (std::size_t s = 0; s < len; ++s) {
      if (kind == SamplerKind::sgld) {
        for (std::size_t i = 0; i < d; ++i) {
          fb[i] = -step * grad[static_cast<Eigen::Index>(i)] + h * rs.normal();
          mb[i] = fb[i] - step * zeta[static_cast<Eigen::Index>(i)];
        }
      } else {
        for (std::size_t i = 0; i < d; ++i) {
          const double u = rs.uniform();
          fb[i] = u < p_plus_fb[static_cast<Eigen::Index>(i)] ? h : -h;
          mb[i] = u < p_plus_mb[static_cast<Eigen::Index>(i)] ? h : -h;
        }
      }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) acc.add(i * d + j, (mb[i] * mb[j] - fb[i] * fb[j]) * inv_step2);
    }
  });

  MatrixEstimate est;
  est.mean.resize(grad.size(), grad.size());
  est.std_error.resize(grad.size(), grad.size());
  est.n_samples = n_samples;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      finish(sums, n_samples, i * d + j, est.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
             est.std_error(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  return est;
}

double NoiseMoments::third_at(std::size_t i, std::size_t j, std::size_t k) const {
  if (third.empty()) return 0.0;
  const auto d = static_cast<std::size_t>(covariance.rows());
  return third[(i * d + j) * d + k];
}

double third_moment_analytic(SamplerKind kind, const ParamVector& grad, const NoiseMoments& noise, double step,
                             std::size_t i, std::size_t j, std::size_t k) {
  check_moment_kind(kind);
  const auto d = static_cast<std::size_t>(grad.size());
  if (noise.covariance.rows() != grad.size() || noise.covariance.cols() != grad.size()) {
    throw DimensionError("third_moment_analytic: noise covariance must be d x d");
  }
  if (!noise.third.empty() && noise.third.size() != d * d * d) {
    throw DimensionError("third_moment_analytic: third-moment tensor must have d^3 entries");
  }
  if (i >= d || j >= d || k >= d) throw InvalidArgument("third_moment_analytic: index out of range");

  const auto g = [&](std::size_t a) { return grad[static_cast<Eigen::Index>(a)]; };
  const auto cov = [&](std::size_t a, std::size_t b) {
    return noise.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  const double d2 = step * step;
  const double d3 = d2 * step;

  if (i == j && j == k) {
    if (kind == SamplerKind::sglrw) return -2.0 * d2 * g(i);
    return -6.0 * d2 * g(i) - d3 * (g(i) * g(i) * g(i) + 3.0 * g(i) * cov(i, i) + noise.third_at(i, i, i));
  }
  if (i == j || j == k || i == k) {
    // Repeated index r, odd index o.
    const std::size_t r = (i == j || i == k) ? i : j;
    const std::size_t o = (i == j) ? k : (i == k ? j : i);
    if (kind == SamplerKind::sglrw) return -2.0 * d2 * g(o);
    return -2.0 * d2 * g(o) -
           d3 * (g(r) * g(r) * g(o) + g(o) * cov(r, r) + 2.0 * g(r) * cov(r, o) + noise.third_at(r, r, o));
  }
  // All distinct: identical for both schemes.
  return -d3 * (g(i) * g(j) * g(k) + g(i) * cov(j, k) + g(j) * cov(k, i) + g(k) * cov(i, j) +
                noise.third_at(i, j, k));
}

TensorEstimate third_moment_tensor_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                                               const SyntheticNoiseModel& noise_model, double step,
                                               std::size_t n_samples, const RandomStream& stream,
                                               std::size_t threads) {
  check_moment_kind(kind);
  require_dims(static_cast<std::size_t>(theta.size()), static_cast<std::size_t>(grad.size()), "third moment theta");
  const auto d = static_cast<std::size_t>(grad.size());
  if (d == 0) throw InvalidArgument("third moment: empty gradient");
  if (noise_model.covariance_factor.rows() != grad.size() || noise_model.covariance_factor.cols() != grad.size()) {
    throw DimensionError("third moment: noise factor must be d x d");
  }
  noise_model.distribution.validate();
  if (!(step > 0.0)) throw InvalidArgument("third moment: step must be positive");
  if (n_samples < 2) throw InvalidArgument("third moment: need at least 2 samples");

  const double a_scale = std::sqrt(step / 2.0);
  if (kind == SamplerKind::sglrw) {
    if (noise_model.distribution.family == NoiseFamily::alpha_stable &&
        !noise_model.covariance_factor.isZero(0.0)) {
      throw NumericalError("third moment: stable noise is unbounded, lattice probabilities would be clipped");
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double sd = noise_model.distribution.scale * noise_model.covariance_factor.row(static_cast<Eigen::Index>(i)).norm();
      if (a_scale * (std::abs(grad[static_cast<Eigen::Index>(i)]) + 8.0 * sd) > 1.0) {
        throw NumericalError("third moment: lattice probabilities would be clipped at coordinate " + std::to_string(i));
      }
    }
  }

  const double h = std::sqrt(2.0 * step);
  const Sums sums = run_blocks(n_samples, d * d * d, stream, threads, [&](RandomStream& rs, std::size_t len, Sums& acc) {
    std::vector<double> inc(d);
    for (std::size_t s = 0; s < len; ++s) {
      const ParamVector zeta = sample_synthetic_noise(rs, noise_model);
      for (std::size_t i = 0; i < d; ++i) {
        const double gi = grad[static_cast<Eigen::Index>(i)] + zeta[static_cast<Eigen::Index>(i)];
        if (kind == SamplerKind::sgld) {
          inc[i] = -step * gi + h * rs.normal();
        } else {
          const double a = a_scale * gi;
          if (std::abs(a) > 1.0) ++acc.clipped;
          inc[i] = rs.uniform() < lrw_transition_prob(gi, step).p_plus ? h : -h;
        }
      }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t k = 0; k < d; ++k) acc.add((i * d + j) * d + k, inc[i] * inc[j] * inc[k]);
    }
  });

  TensorEstimate est;
  est.d = d;
  est.n_samples = n_samples;
  est.mean.resize(d * d * d);
  est.std_error.resize(d * d * d);
  for (std::size_t e = 0; e < d * d * d; ++e) finish(sums, n_samples, e, est.mean[e], est.std_error[e]);
  est.clipped_fraction = static_cast<double>(sums.clipped) / (static_cast<double>(n_samples) * static_cast<double>(d));
  return est;
}

ScalarEstimate third_moment_monte_carlo(SamplerKind kind, const ParamVector& theta, const ParamVector& grad,
                                        const SyntheticNoiseModel& noise_model, double step, std::size_t i,
                                        std::size_t j, std::size_t k, std::size_t n_samples,
                                        const RandomStream& stream, std::size_t threads) {
  const auto d = static_cast<std::size_t>(grad.size());
  if (i >= d || j >= d || k >= d) throw InvalidArgument("third_moment_monte_carlo: index out of range");
  const auto t = third_moment_tensor_monte_carlo(kind, theta, grad, noise_model, step, n_samples, stream, threads);
  return {t.at(i, j, k), t.se_at(i, j, k), n_samples};
}

double clipped_increment_constant_closed_form() {
  return 1.0 - std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5);
}

ScalarEstimate clipped_increment_covariance_constant(std::size_t n_samples, RandomStream& stream) {
  if (n_samples < 10000) throw InvalidArgument("clip constant: need at least 1e4 samples");
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double xi = stream.normal();
    const double v = std::min(xi * xi, 1.0);
    s1 += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = s1 / n;
  const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n), n_samples};
}

}  // namespace lattice
