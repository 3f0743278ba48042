#include "lattice/samplers/step.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lattice/core/error.hpp"

namespace lattice {

std::string_view to_string(SamplerKind kind) noexcept {
  switch (kind) {
    case SamplerKind::sgld:
      return "sgld";
    case SamplerKind::sglrw:
      return "sglrw";
    case SamplerKind::clipped_sgld:
      return "clipped_sgld";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "sgld") return SamplerKind::sgld;
  if (name == "sglrw") return SamplerKind::sglrw;
  if (name == "clipped_sgld") return SamplerKind::clipped_sgld;
  throw InvalidArgument("unknown sampler '" + std::string(name) + "' (expected sgld, sglrw or clipped_sgld)");
}

TransitionProb lrw_transition_prob(double grad_component, double step) {
  const double a = std::clamp(std::sqrt(step / 2.0) * grad_component, -1.0, 1.0);
  return {0.5 - 0.5 * a, 0.5 + 0.5 * a};
}

void minibatch_grad_estimate_into(const TargetModel& model, const ParamVector& params,
                                  std::span<const std::size_t> batch, ParamVector& out) {
  // Same accumulation order as TargetModel::full_gradient, so the full index
  // set in natural order reproduces it bit for bit.
  out.setZero(params.size());
  model.add_prior_gradient(params, out);
  const double scale = batch.empty() ? 0.0 : static_cast<double>(model.num_data()) / static_cast<double>(batch.size());
  for (std::size_t i : batch) model.add_datum_gradient(params, i, scale, out);
  out = -out;
}

ParamVector minibatch_grad_estimate(const TargetModel& model, const ParamVector& params,
                                   std::span<const std::size_t> batch) {
  require_dims(static_cast<std::size_t>(params.size()), model.dim(), "minibatch gradient");
  if (batch.empty()) throw InvalidArgument("minibatch gradient: batch is empty");
  for (std::size_t i : batch) {
    if (i >= model.num_data()) throw InvalidArgument("minibatch gradient: index " + std::to_string(i) + " out of range");
  }
  ParamVector out;
  minibatch_grad_estimate_into(model, params, batch, out);
  return out;
}

void sglrw_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream) {
  const double h = std::sqrt(2.0 * step);
  const double a_scale = std::sqrt(step / 2.0);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double a = std::clamp(a_scale * grad[i], -1.0, 1.0);
    const double p_plus = 0.5 - 0.5 * a;
    params[i] += stream.uniform() < p_plus ? h : -h;
  }
}

bool sgld_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream) {
  const double h = std::sqrt(2.0 * step);
  bool finite = true;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    params[i] += -step * grad[i] + h * stream.normal();
    finite = finite && std::isfinite(params[i]);
  }
  return finite;
}

bool clipped_sgld_update(ParamVector& params, const ParamVector& grad, double step, RandomStream& stream) {
  const double h = std::sqrt(2.0 * step);
  bool finite = true;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double drift = std::clamp(step * grad[i], -h, h);
    params[i] += -drift + h * stream.normal();
    finite = finite && std::isfinite(params[i]);
  }
  return finite;
}

namespace {

void check_step(const SamplerState& state, const ParamVector& grad, double step) {
  if (!(step > 0.0)) throw InvalidArgument("sampler step: step size must be positive");
  require_dims(static_cast<std::size_t>(grad.size()), static_cast<std::size_t>(state.params.size()),
               "gradient estimate");
}

}  // namespace

SamplerState sglrw_step(const SamplerState& state, const ParamVector& grad, double step, RandomStream& stream) {
  check_step(state, grad, step);
  SamplerState next{state.params, state.iteration + 1, state.diverged};
  sglrw_update(next.params, grad, step, stream);
  return next;
}

SamplerState sgld_step(const SamplerState& state, const ParamVector& grad, double step, RandomStream& stream) {
  check_step(state, grad, step);
  SamplerState next{state.params, state.iteration + 1, state.diverged};
  next.diverged = !sgld_update(next.params, grad, step, stream) || state.diverged;
  return next;
}

SamplerState clipped_sgld_step(const SamplerState& state, const ParamVector& grad, double step,
                               RandomStream& stream) {
  check_step(state, grad, step);
  SamplerState next{state.params, state.iteration + 1, state.diverged};
  next.diverged = !clipped_sgld_update(next.params, grad, step, stream) || state.diverged;
  return next;
}

SamplerState sglrw_step(const SamplerState& state, const TargetModel& model, std::span<const std::size_t> batch,
                        double step, RandomStream& stream) {
  return sglrw_step(state, minibatch_grad_estimate(model, state.params, batch), step, stream);
}

SamplerState sgld_step(const SamplerState& state, const TargetModel& model, std::span<const std::size_t> batch,
                       double step, RandomStream& stream) {
  return sgld_step(state, minibatch_grad_estimate(model, state.params, batch), step, stream);
}

SamplerState clipped_sgld_step(const SamplerState& state, const TargetModel& model,
                               std::span<const std::size_t> batch, double step, RandomStream& stream) {
  return clipped_sgld_step(state, minibatch_grad_estimate(model, state.params, batch), step, stream);
}

SamplerState sampler_step(SamplerKind kind, const SamplerState& state, const ParamVector& grad, double step,
                          RandomStream& stream) {
  switch (kind) {
    case SamplerKind::sgld:
      return sgld_step(state, grad, step, stream);
    case SamplerKind::sglrw:
      return sglrw_step(state, grad, step, stream);
    case SamplerKind::clipped_sgld:
      return clipped_sgld_step(state, grad, step, stream);
  }
  throw InvalidArgument("sampler_step: unknown sampler kind");
}

}  // namespace lattice
