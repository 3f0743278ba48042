#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "lattice/core/chain_config.hpp"
#include "lattice/core/schedule.hpp"
#include "lattice/samplers/step.hpp"

namespace lattice {

enum class ExperimentKind { linreg, logreg, heavy1d, mse_sweep, moment_check, clip_constant };

std::string_view to_string(ExperimentKind kind) noexcept;

/// Everything an experiment run needs. Parsed from a flat `key = value` file;
/// see parse_config for the key list and defaults.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::clip_constant;

  std::vector<SamplerKind> samplers{SamplerKind::sgld, SamplerKind::sglrw, SamplerKind::clipped_sgld};
  std::vector<std::size_t> batch_sizes{32};
  std::vector<double> base_steps{1e-3};
  ScheduleMode schedule = ScheduleMode::decaying;
  double decay_exponent = 0.55;

  std::size_t d = 10;
  std::size_t N = 500;
  std::size_t n_chains = 100;
  std::size_t n_iters = 1000;
  std::size_t burn_in = 0;
  RetainPolicy retain = RetainPolicy::final_only;
  std::vector<std::uint64_t> seeds{0};
  /// Chains start at 0 + init_spread * N(0, I), the same draws for every sampler.
  double init_spread = 0.0;
  std::size_t threads = 0;

  // Data (linreg, logreg, mse_sweep).
  std::uint64_t data_seed = 2024;
  std::string data_file;
  double noise_variance = 1.5;
  /// Standard deviation of synthetic design entries (linreg, mse_sweep).
  double feature_scale = 1.0;
  /// Unset means 0.01 for linear regression and 1 for logistic regression.
  std::optional<double> prior_precision;
  double class_separation = 1.5;

  // Reference chain (logreg).
  double reference_step = 1e-4;
  std::size_t reference_length = 200000;
  std::size_t reference_burn_in = 20000;
  std::size_t reference_thin = 10;

  // Heavy-tailed 1-D experiment.
  double noise_alpha = 1.5;
  std::vector<double> noise_scales{0.0, 1.0, 5.0, 20.0};
  std::vector<double> mixture_weights{0.3, 0.4, 0.3};
  std::vector<double> mixture_means{-4.0, 0.0, 4.0};
  std::vector<double> mixture_stds{0.8, 0.8, 0.8};
  std::size_t tv_bins = 80;

  // Covariance MSE sweep.
  std::size_t repetitions = 5;

  // Moment oracles.
  std::size_t n_samples = 1000000;
  std::size_t moment_dim = 3;
  std::size_t moment_pairs = 20;
  double moment_step = 1e-2;
  double moment_noise_var = 0.25;

  std::string output;
  bool record_runtime = true;

  double effective_prior_precision() const;
  /// Throws ConfigError if any field violates its constraints.
  void validate() const;
};

/// Strict parser. Unknown or repeated keys, malformed values and a missing
/// `experiment` key are ConfigErrors carrying the 1-based line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
/// Throws IoError if the file cannot be opened.
ExperimentConfig parse_config_file(const std::string& path);

/// One (batch size or noise scale, base step, seed) cell of the experiment grid.
struct GridPoint {
  std::size_t batch_size = 0;
  double noise_scale = 0.0;
  double base_step = 0.0;
  std::uint64_t seed = 0;
};

/// Cartesian product in deterministic order: outer batch size (or noise scale
/// for heavy1d), then base step, then seed. Empty for moment_check; one point
/// per seed for clip_constant.
std::vector<GridPoint> enumerate_grid(const ExperimentConfig& config);

}  // namespace lattice
