#include "latticewalk/latticewalk.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <variant>

#include "lattice/core/error.hpp"
#include "lattice/core/rng.hpp"
#include "lattice/core/schedule.hpp"
#include "lattice/diagnostics/gaussian.hpp"
#include "lattice/diagnostics/moments.hpp"
#include "lattice/harness/config.hpp"
#include "lattice/harness/experiments.hpp"
#include "lattice/models/dataset.hpp"
#include "lattice/models/linear_gaussian.hpp"
#include "lattice/models/logistic.hpp"
#include "lattice/samplers/chain.hpp"
#include "lattice/samplers/step.hpp"

struct lw_model {
  std::unique_ptr<lattice::TargetModel> model;
  const lattice::LinearGaussianModel* linear = nullptr;
};

struct lw_config {
  lattice::ExperimentConfig config;
  std::string experiment_name;
};

struct lw_run {
  lattice::ParallelRunResult result;
  std::size_t dim = 0;
  lattice::RowMatrix pooled;
};

namespace {

thread_local std::string g_last_error;

class CheckFailed : public lattice::Error {
 public:
  using lattice::Error::Error;
};

lw_status fail(lw_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
lw_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return LW_OK;
  } catch (const lattice::ConfigError& e) {
    return fail(LW_CONFIG_ERROR, e.what());
  } catch (const lattice::DimensionError& e) {
    return fail(LW_DIMENSION_MISMATCH, e.what());
  } catch (const lattice::InvalidArgument& e) {
    return fail(LW_INVALID_ARGUMENT, e.what());
  } catch (const lattice::IoError& e) {
    return fail(LW_IO_ERROR, e.what());
  } catch (const lattice::DivergenceError& e) {
    return fail(LW_DIVERGED, e.what());
  } catch (const lattice::NumericalError& e) {
    return fail(LW_NUMERICAL_ERROR, e.what());
  } catch (const CheckFailed& e) {
    return fail(LW_CHECK_FAILED, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LW_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(LW_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(LW_INTERNAL_ERROR, "unknown error");
  }
}

void need(const void* ptr, const char* what) {
  if (ptr == nullptr) throw lattice::InvalidArgument(std::string(what) + " must not be null");
}

lattice::RowMatrix copy_matrix(const double* data, std::size_t n, std::size_t d) {
  need(data, "matrix data");
  if (n == 0 || d == 0) throw lattice::InvalidArgument("matrix must be non-empty");
  return Eigen::Map<const lattice::RowMatrix>(data, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

Eigen::VectorXd copy_vector(const double* data, std::size_t n) {
  need(data, "vector data");
  return Eigen::Map<const Eigen::VectorXd>(data, static_cast<Eigen::Index>(n));
}

lattice::Matrix copy_square(const double* data, std::size_t d) {
  need(data, "covariance");
  return Eigen::Map<const lattice::RowMatrix>(data, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

void write_vector(const Eigen::VectorXd& v, double* out) {
  need(out, "output");
  std::copy(v.data(), v.data() + v.size(), out);
}

void write_square(const lattice::Matrix& m, double* out) {
  need(out, "output");
  Eigen::Map<lattice::RowMatrix>(out, m.rows(), m.cols()) = m;
}

const lattice::TargetModel& checked_model(const lw_model* model, std::size_t d) {
  need(model, "model");
  if (d != model->model->dim())
    throw lattice::DimensionError("theta has " + std::to_string(d) + " entries, model dimension is " +
                                  std::to_string(model->model->dim()));
  return *model->model;
}

lattice::SamplerKind to_kind(lw_sampler s) {
  switch (s) {
    case LW_SAMPLER_SGLD:
      return lattice::SamplerKind::sgld;
    case LW_SAMPLER_SGLRW:
      return lattice::SamplerKind::sglrw;
    case LW_SAMPLER_CLIPPED_SGLD:
      return lattice::SamplerKind::clipped_sgld;
  }
  throw lattice::InvalidArgument("unknown sampler");
}

lattice::ScheduleMode to_mode(lw_schedule_mode m) {
  switch (m) {
    case LW_SCHEDULE_DECAYING:
      return lattice::ScheduleMode::decaying;
    case LW_SCHEDULE_FIXED:
      return lattice::ScheduleMode::fixed;
  }
  throw lattice::InvalidArgument("unknown schedule mode");
}

lw_model* wrap_linear(lattice::LinearGaussianModel m) {
  auto owned = std::make_unique<lattice::LinearGaussianModel>(std::move(m));
  auto* out = new lw_model;
  out->linear = owned.get();
  out->model = std::move(owned);
  return out;
}

lw_model* wrap_logistic(lattice::LogisticModel m) {
  auto* out = new lw_model;
  out->model = std::make_unique<lattice::LogisticModel>(std::move(m));
  return out;
}

}  // namespace

extern "C" {

const char* lw_version(void) { return LATTICEWALK_VERSION; }

const char* lw_last_error(void) { return g_last_error.c_str(); }

const char* lw_status_string(lw_status status) {
  switch (status) {
    case LW_OK:
      return "ok";
    case LW_INVALID_ARGUMENT:
      return "invalid argument";
    case LW_DIMENSION_MISMATCH:
      return "dimension mismatch";
    case LW_CONFIG_ERROR:
      return "configuration error";
    case LW_IO_ERROR:
      return "i/o error";
    case LW_NUMERICAL_ERROR:
      return "numerical error";
    case LW_DIVERGED:
      return "diverged";
    case LW_CHECK_FAILED:
      return "check failed";
    case LW_INTERNAL_ERROR:
      return "internal error";
  }
  return "unknown status";
}

lw_status lw_model_linreg_create(const double* design, const double* targets, size_t n, size_t d,
                                 double noise_variance, double prior_precision, lw_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = wrap_linear(lattice::LinearGaussianModel(copy_matrix(design, n, d), copy_vector(targets, n),
                                                    noise_variance, prior_precision));
  });
}

lw_status lw_model_linreg_synthetic(size_t n, size_t d, double noise_variance, double prior_precision, uint64_t seed,
                                    lw_model** out) {
  return guarded([&] {
    need(out, "out");
    lattice::RandomStream stream(seed);
    *out = wrap_linear(lattice::make_synthetic_linear(n, d, noise_variance, prior_precision, stream).model);
  });
}

lw_status lw_model_logreg_create(const double* features, const double* labels, size_t n, size_t d,
                                 double prior_precision, lw_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = wrap_logistic(lattice::LogisticModel(copy_matrix(features, n, d), copy_vector(labels, n), prior_precision));
  });
}

lw_status lw_model_logreg_synthetic(size_t n, size_t d, double class_separation, double prior_precision,
                                    uint64_t seed, lw_model** out) {
  return guarded([&] {
    need(out, "out");
    lattice::RandomStream stream(seed);
    *out = wrap_logistic(lattice::make_synthetic_logistic(n, d, class_separation, prior_precision, stream));
  });
}

lw_status lw_model_load_linreg(const char* path, double noise_variance, double prior_precision, lw_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto data = lattice::load_dataset(path);
    *out = wrap_linear(
        lattice::LinearGaussianModel(std::move(data.features), std::move(data.targets), noise_variance, prior_precision));
  });
}

void lw_model_destroy(lw_model* model) { delete model; }

size_t lw_model_dim(const lw_model* model) { return model ? model->model->dim() : 0; }

size_t lw_model_num_data(const lw_model* model) { return model ? model->model->num_data() : 0; }

lw_status lw_model_potential(const lw_model* model, const double* theta, size_t d, double* out) {
  return guarded([&] {
    const auto& m = checked_model(model, d);
    need(out, "out");
    *out = m.potential(copy_vector(theta, d));
  });
}

lw_status lw_model_full_gradient(const lw_model* model, const double* theta, size_t d, double* out) {
  return guarded([&] {
    const auto& m = checked_model(model, d);
    write_vector(m.full_gradient(copy_vector(theta, d)), out);
  });
}

lw_status lw_model_per_datum_gradient(const lw_model* model, const double* theta, size_t d, size_t index,
                                      double* out) {
  return guarded([&] {
    const auto& m = checked_model(model, d);
    write_vector(m.per_datum_gradient(copy_vector(theta, d), index), out);
  });
}

lw_status lw_model_minibatch_gradient(const lw_model* model, const double* theta, size_t d, const size_t* indices,
                                      size_t batch_size, double* out) {
  return guarded([&] {
    const auto& m = checked_model(model, d);
    need(indices, "indices");
    write_vector(lattice::minibatch_grad_estimate(m, copy_vector(theta, d), {indices, batch_size}), out);
  });
}

lw_status lw_linreg_posterior(const lw_model* model, double* mean, double* covariance) {
  return guarded([&] {
    need(model, "model");
    if (model->linear == nullptr) throw lattice::InvalidArgument("model is not a linear-Gaussian regression");
    const auto post = lattice::linreg_analytic_posterior(*model->linear);
    write_vector(post.mean, mean);
    write_square(post.covariance, covariance);
  });
}

lw_status lw_schedule_step(double base_step, double decay_exponent, lw_schedule_mode mode, uint64_t t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = lattice::schedule_step_size(lattice::StepSchedule{base_step, decay_exponent, to_mode(mode)}, t);
  });
}

lw_status lw_lrw_transition_prob(double step, double grad, double* p_plus, double* p_minus) {
  return guarded([&] {
    need(p_plus, "p_plus");
    need(p_minus, "p_minus");
    const auto p = lattice::lrw_transition_prob(grad, step);
    *p_plus = p.p_plus;
    *p_minus = p.p_minus;
  });
}

lw_status lw_run_chains(const lw_model* model, lw_sampler sampler, size_t batch_size, double base_step,
                        double decay_exponent, lw_schedule_mode mode, const lw_chain_options* options, lw_run** out) {
  return guarded([&] {
    need(model, "model");
    need(options, "options");
    need(out, "out");
    lattice::ChainConfig cc;
    cc.n_chains = options->n_chains;
    cc.n_iters = options->n_iters;
    cc.burn_in = options->burn_in;
    cc.master_seed = options->master_seed;
    cc.retain = options->retain == LW_RETAIN_ALL_POST_BURNIN ? lattice::RetainPolicy::all_post_burnin
                                                             : lattice::RetainPolicy::final_only;
    cc.threads = options->threads;
    auto run = std::make_unique<lw_run>();
    run->result = lattice::run_parallel_chains(to_kind(sampler), *model->model,
                                               lattice::StepSchedule{base_step, decay_exponent, to_mode(mode)}, cc,
                                               batch_size);
    run->dim = model->model->dim();
    run->pooled = run->result.pooled_samples();
    *out = run.release();
  });
}

void lw_run_destroy(lw_run* run) { delete run; }

size_t lw_run_num_chains(const lw_run* run) { return run ? run->result.chains.size() : 0; }

size_t lw_run_dim(const lw_run* run) { return run ? run->dim : 0; }

size_t lw_run_diverged_count(const lw_run* run) { return run ? run->result.diverged_count() : 0; }

int lw_run_chain_diverged(const lw_run* run, size_t chain) {
  if (!run || chain >= run->result.chains.size()) return -1;
  return run->result.chains[chain].diverged ? 1 : 0;
}

size_t lw_run_chain_num_samples(const lw_run* run, size_t chain) {
  if (!run || chain >= run->result.chains.size()) return 0;
  return static_cast<size_t>(run->result.chains[chain].samples.rows());
}

lw_status lw_run_chain_samples(const lw_run* run, size_t chain, double* out, size_t capacity) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    if (chain >= run->result.chains.size()) throw lattice::InvalidArgument("chain index out of range");
    const auto& s = run->result.chains[chain].samples;
    if (capacity < static_cast<size_t>(s.size())) throw lattice::DimensionError("output buffer too small");
    std::copy(s.data(), s.data() + s.size(), out);
  });
}

size_t lw_run_pooled_count(const lw_run* run) { return run ? static_cast<size_t>(run->pooled.rows()) : 0; }

lw_status lw_run_pooled_samples(const lw_run* run, double* out, size_t capacity) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    const auto& s = run->pooled;
    if (capacity < static_cast<size_t>(s.size())) throw lattice::DimensionError("output buffer too small");
    std::copy(s.data(), s.data() + s.size(), out);
  });
}

lw_status lw_gaussian_kl(const double* m1, const double* s1, const double* m2, const double* s2, size_t d,
                         double* out) {
  return guarded([&] {
    need(out, "out");
    if (d == 0) throw lattice::InvalidArgument("dimension must be positive");
    const lattice::GaussianSummary p{copy_vector(m1, d), copy_square(s1, d)};
    const lattice::GaussianSummary q{copy_vector(m2, d), copy_square(s2, d)};
    *out = lattice::gaussian_kl(p, q);
  });
}

lw_status lw_gaussian_fit(const double* samples, size_t n, size_t d, double* mean, double* covariance) {
  return guarded([&] {
    const auto fit = lattice::empirical_gaussian_fit(copy_matrix(samples, n, d));
    write_vector(fit.mean, mean);
    write_square(fit.covariance, covariance);
  });
}

double lw_clip_constant_closed_form(void) { return lattice::clipped_increment_constant_closed_form(); }

lw_status lw_clip_constant_estimate(size_t n_samples, uint64_t seed, double* estimate, double* std_error) {
  return guarded([&] {
    need(estimate, "estimate");
    lattice::RandomStream stream = lattice::derive_chain_stream(seed, 0);
    const auto est = lattice::clipped_increment_covariance_constant(n_samples, stream);
    *estimate = est.mean;
    if (std_error) *std_error = est.std_error;
  });
}

lw_status lw_config_load(const char* path, lw_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto cfg = std::make_unique<lw_config>();
    cfg->config = lattice::parse_config_file(path);
    cfg->experiment_name = std::string(lattice::to_string(cfg->config.experiment));
    *out = cfg.release();
  });
}

lw_status lw_config_parse(const char* text, lw_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    auto cfg = std::make_unique<lw_config>();
    cfg->config = lattice::parse_config_string(text);
    cfg->experiment_name = std::string(lattice::to_string(cfg->config.experiment));
    *out = cfg.release();
  });
}

void lw_config_destroy(lw_config* config) { delete config; }

const char* lw_config_experiment(const lw_config* config) {
  return config ? config->experiment_name.c_str() : "";
}

const char* lw_config_output(const lw_config* config) { return config ? config->config.output.c_str() : ""; }

lw_status lw_config_set_output(lw_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    config->config.output = path;
  });
}

lw_status lw_config_set_seed(lw_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->config.seeds = {seed};
  });
}

lw_status lw_config_set_threads(lw_config* config, size_t threads) {
  return guarded([&] {
    need(config, "config");
    config->config.threads = threads;
  });
}

lw_status lw_config_set_record_runtime(lw_config* config, int enabled) {
  return guarded([&] {
    need(config, "config");
    config->config.record_runtime = enabled != 0;
  });
}

lw_status lw_experiment_run(const lw_config* config, const char* csv_path, size_t* rows) {
  return guarded([&] {
    need(config, "config");
    lattice::ExperimentOutcome outcome;
    if (csv_path == nullptr || std::strcmp(csv_path, "-") == 0) {
      outcome = lattice::run_experiment(config->config, std::cout, std::cerr);
    } else {
      std::ofstream file(csv_path);
      if (!file) throw lattice::IoError(std::string("cannot open output file: ") + csv_path);
      outcome = lattice::run_experiment(config->config, file, std::cerr);
      file.close();
      if (!file) throw lattice::IoError(std::string("failed writing output file: ") + csv_path);
    }
    if (rows) *rows = outcome.rows;
    if (!outcome.checks_passed) throw CheckFailed(config->experiment_name + ": one or more checks failed");
  });
}

}  // extern "C"
