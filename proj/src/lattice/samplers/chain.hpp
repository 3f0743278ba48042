#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lattice/core/chain_config.hpp"
#include "lattice/core/rng.hpp"
#include "lattice/core/schedule.hpp"
#include "lattice/core/types.hpp"
#include "lattice/samplers/gradient_source.hpp"
#include "lattice/samplers/step.hpp"

namespace lattice {

/// Sub-stream tags under a chain's stream. The data tag is shared by every
/// sampler so that, for a given (seed, chain), all samplers see the same
/// sequence of minibatches / synthetic noise; the injection tag feeds the
/// sampler's own Gaussian or lattice draws.
inline constexpr std::uint64_t kDataStreamTag = 1;
inline constexpr std::uint64_t kInjectionStreamTag = 2;

struct ChainResult {
  /// One row per retained sample (the state after iteration t, for t >= burn_in,
  /// or only the final state).
  RowMatrix samples;
  bool diverged = false;
  /// Iteration at which theta became non-finite.
  std::optional<std::uint64_t> divergence_iteration;
};

ChainResult run_chain(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                      const ChainConfig& config, std::size_t chain_index, const ParamVector& initial);

/// Convenience overload: minibatch gradients of `batch_size`, starting at zero.
ChainResult run_chain(SamplerKind kind, const TargetModel& model, const StepSchedule& schedule,
                      const ChainConfig& config, std::size_t batch_size, std::size_t chain_index);

struct ParallelRunResult {
  std::vector<ChainResult> chains;
  /// Indices of diverged chains, ascending.
  std::vector<std::size_t> diverged_chains;

  std::size_t diverged_count() const noexcept { return diverged_chains.size(); }
  /// Retained samples of all non-diverged chains, stacked in chain order.
  RowMatrix pooled_samples() const;
};

/// n_chains independent chains, chain c seeded by derive_chain_stream(master_seed, c).
/// Output is independent of config.threads.
ParallelRunResult run_parallel_chains(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                                      const ChainConfig& config, const ParamVector& initial);

ParallelRunResult run_parallel_chains(SamplerKind kind, const TargetModel& model, const StepSchedule& schedule,
                                      const ChainConfig& config, std::size_t batch_size);

/// Per-chain starting points: row c of initial_states starts chain c.
ParallelRunResult run_parallel_chains(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                                      const ChainConfig& config, const RowMatrix& initial_states);

/// n_chains starting points center + spread * N(0, I), drawn from `stream`
/// in chain order. spread = 0 gives n_chains copies of center.
RowMatrix dispersed_initial_states(const ParamVector& center, double spread, std::size_t n_chains,
                                   RandomStream stream);

struct ReferenceOptions {
  double fine_step = 1e-4;
  std::size_t length = 100000;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
};

/// Full-batch SGLD at a fixed fine step, keeping every `thin`-th state after
/// burn_in. Throws DivergenceError if the chain leaves the finite reals.
RowMatrix reference_chain(const TargetModel& model, const ReferenceOptions& options, RandomStream& stream,
                          const ParamVector& initial);

}  // namespace lattice
