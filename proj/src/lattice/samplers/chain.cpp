#include "lattice/samplers/chain.hpp"

#include <cmath>

#include "lattice/core/error.hpp"
#include "lattice/core/parallel.hpp"

namespace lattice {

namespace {

bool apply_update(SamplerKind kind, ParamVector& params, const ParamVector& grad, double step, RandomStream& stream) {
  switch (kind) {
    case SamplerKind::sglrw:
      sglrw_update(params, grad, step, stream);
      return true;
    case SamplerKind::sgld:
      return sgld_update(params, grad, step, stream);
    case SamplerKind::clipped_sgld:
      return clipped_sgld_update(params, grad, step, stream);
  }
  return false;
}

}  // namespace

ChainResult run_chain(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                      const ChainConfig& config, std::size_t chain_index, const ParamVector& initial) {
  config.validate();
  schedule.validate();
  require_dims(static_cast<std::size_t>(initial.size()), source.model().dim(), "initial state");

  RandomStream chain_stream = derive_chain_stream(config.master_seed, chain_index);
  RandomStream data_stream = chain_stream.split(kDataStreamTag);
  RandomStream injection_stream = chain_stream.split(kInjectionStreamTag);
  auto estimate = source.make_estimator();

  ChainResult result;
  const auto d = initial.size();
  result.samples.resize(static_cast<Eigen::Index>(config.retained_per_chain()), d);
  Eigen::Index kept = 0;

  ParamVector params = initial;
  ParamVector grad(d);
  for (std::size_t t = 0; t < config.n_iters; ++t) {
    const double step = schedule_step_size(schedule, t);
    estimate(params, data_stream, grad);
    if (!apply_update(kind, params, grad, step, injection_stream)) {
      result.diverged = true;
      result.divergence_iteration = t;
      break;
    }
    const bool keep = config.retain == RetainPolicy::final_only ? t + 1 == config.n_iters : t >= config.burn_in;
    if (keep) result.samples.row(kept++) = params.transpose();
  }
  result.samples.conservativeResize(kept, d);
  return result;
}

ChainResult run_chain(SamplerKind kind, const TargetModel& model, const StepSchedule& schedule,
                      const ChainConfig& config, std::size_t batch_size, std::size_t chain_index) {
  const auto source = GradientSource::minibatch(model, batch_size);
  return run_chain(kind, source, schedule, config, chain_index,
                   ParamVector::Zero(static_cast<Eigen::Index>(model.dim())));
}

RowMatrix ParallelRunResult::pooled_samples() const {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& c : chains) {
    if (c.diverged) continue;
    rows += c.samples.rows();
    cols = c.samples.cols();
  }
  RowMatrix pooled(rows, cols);
  Eigen::Index at = 0;
  for (const auto& c : chains) {
    if (c.diverged) continue;
    pooled.middleRows(at, c.samples.rows()) = c.samples;
    at += c.samples.rows();
  }
  return pooled;
}

ParallelRunResult run_parallel_chains(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                                      const ChainConfig& config, const ParamVector& initial) {
  config.validate();
  schedule.validate();
  ParallelRunResult result;
  result.chains.resize(config.n_chains);
  parallel_for(config.n_chains, config.threads, [&](std::size_t c) {
    result.chains[c] = run_chain(kind, source, schedule, config, c, initial);
  });
  for (std::size_t c = 0; c < result.chains.size(); ++c) {
    if (result.chains[c].diverged) result.diverged_chains.push_back(c);
  }
  return result;
}

ParallelRunResult run_parallel_chains(SamplerKind kind, const GradientSource& source, const StepSchedule& schedule,
                                      const ChainConfig& config, const RowMatrix& initial_states) {
  config.validate();
  schedule.validate();
  if (initial_states.rows() != static_cast<Eigen::Index>(config.n_chains)) {
    throw DimensionError("initial states: expected one row per chain");
  }
  ParallelRunResult result;
  result.chains.resize(config.n_chains);
  parallel_for(config.n_chains, config.threads, [&](std::size_t c) {
    const ParamVector init = initial_states.row(static_cast<Eigen::Index>(c)).transpose();
    result.chains[c] = run_chain(kind, source, schedule, config, c, init);
  });
  for (std::size_t c = 0; c < result.chains.size(); ++c) {
    if (result.chains[c].diverged) result.diverged_chains.push_back(c);
  }
  return result;
}

RowMatrix dispersed_initial_states(const ParamVector& center, double spread, std::size_t n_chains,
                                   RandomStream stream) {
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw InvalidArgument("initial spread must be non-negative");
  RowMatrix states(static_cast<Eigen::Index>(n_chains), center.size());
  for (Eigen::Index c = 0; c < states.rows(); ++c) {
    for (Eigen::Index i = 0; i < states.cols(); ++i) {
      states(c, i) = spread == 0.0 ? center[i] : center[i] + spread * stream.normal();
    }
  }
  return states;
}

ParallelRunResult run_parallel_chains(SamplerKind kind, const TargetModel& model, const StepSchedule& schedule,
                                      const ChainConfig& config, std::size_t batch_size) {
  const auto source = GradientSource::minibatch(model, batch_size);
  const ParamVector zero = ParamVector::Zero(static_cast<Eigen::Index>(model.dim()));
  return run_parallel_chains(kind, source, schedule, config, zero);
}

RowMatrix reference_chain(const TargetModel& model, const ReferenceOptions& options, RandomStream& stream,
                          const ParamVector& initial) {
  if (!(options.fine_step > 0.0)) throw InvalidArgument("reference chain: fine_step must be positive");
  if (options.thin == 0) throw InvalidArgument("reference chain: thin must be positive");
  if (options.burn_in >= options.length) throw InvalidArgument("reference chain: burn_in must be below length");
  require_dims(static_cast<std::size_t>(initial.size()), model.dim(), "initial state");

  const std::size_t kept_total = (options.length - options.burn_in) / options.thin;
  RowMatrix samples(static_cast<Eigen::Index>(kept_total), initial.size());
  ParamVector params = initial;
  Eigen::Index kept = 0;
  for (std::size_t t = 0; t < options.length; ++t) {
    const ParamVector grad = model.full_gradient(params);
    if (!sgld_update(params, grad, options.fine_step, stream)) {
      throw DivergenceError("reference chain diverged at iteration " + std::to_string(t) + " with fine_step " +
                            std::to_string(options.fine_step));
    }
    if (t >= options.burn_in && (t - options.burn_in + 1) % options.thin == 0 && kept < samples.rows()) {
      samples.row(kept++) = params.transpose();
    }
  }
  return samples;
}

}  // namespace lattice
