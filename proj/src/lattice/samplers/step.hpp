#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/models/target_model.hpp"

namespace lattice {

enum class SamplerKind { sgld, sglrw, clipped_sgld };

std::string_view to_string(SamplerKind kind) noexcept;
/// Accepts "sgld", "sglrw", "clipped_sgld"; throws InvalidArgument otherwise.
SamplerKind parse_sampler_kind(std::string_view name);

/// theta_t plus its iteration counter. `diverged` is set by the Euler-type
/// updates when theta stops being finite; lattice updates never set it.
struct SamplerState {
  ParamVector params;
  std::uint64_t iteration = 0;
  bool diverged = false;
};

/// Sign probabilities for one lattice coordinate. With
/// a = clamp(sqrt(step / 2) * grad_component, -1, 1):
/// p_plus = (1 - a) / 2 for a move of +sqrt(2 step), p_minus = (1 + a) / 2.
struct TransitionProb {
  double p_plus;
  double p_minus;
};

TransitionProb lrw_transition_prob(double grad_component, double step);

/// -grad log p(theta) - (N / B) sum_{i in batch} grad log p(y_i | x_i, theta).
/// Throws InvalidArgument on an empty batch or an out-of-range index.
ParamVector minibatch_grad_estimate(const TargetModel& model, const ParamVector& params,
                                   std::span<const std::size_t> batch);

/// Unchecked, allocation-free variant for the chain loop.
void minibatch_grad_estimate_into(const TargetModel& model, const ParamVector& params,
                                  std::span<const std::size_t> batch, ParamVector& out);

// In-place kernels. `grad` is the (possibly stochastic) gradient estimate of U.

/// Each coordinate moves by exactly +-sqrt(2 step); one uniform per coordinate.
void sglrw_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream);
/// theta += -step grad + sqrt(2 step) xi. Returns false if theta became non-finite.
bool sgld_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream);
/// theta += -clip(step grad; sqrt(2 step)) + sqrt(2 step) xi, clip componentwise.
bool clipped_sgld_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream);

SamplerState sglrw_step(const SamplerState& state, const ParamVector& grad, double step, RandomStream& stream);
SamplerState sgld_step(const SamplerState& state, const ParamVector& grad, double step, RandomStream& stream);
SamplerState clipped_sgld_step(const SamplerState& state, const ParamVector& grad, double step,
                               RandomStream& stream);

SamplerState sglrw_step(const SamplerState& state, const TargetModel& model, std::span<const std::size_t> batch,
                        double step, RandomStream& stream);
SamplerState sgld_step(const SamplerState& state, const TargetModel& model, std::span<const std::size_t> batch,
                       double step, RandomStream& stream);
SamplerState clipped_sgld_step(const SamplerState& state, const TargetModel& model,
                               std::span<const std::size_t> batch, double step, RandomStream& stream);

SamplerState sampler_step(SamplerKind kind, const SamplerState& state, const ParamVector& grad, double step,
                          RandomStream& stream);

}  // namespace lattice
