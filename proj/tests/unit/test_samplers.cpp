#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "../support/oracles.hpp"
#include "lattice/core/error.hpp"
#include "lattice/models/linear_gaussian.hpp"
#include "lattice/models/mixture1d.hpp"
#include "lattice/models/quadratic.hpp"
#include "lattice/noise/noise.hpp"
#include "lattice/samplers/chain.hpp"
#include "lattice/samplers/gradient_source.hpp"
#include "lattice/samplers/step.hpp"

using namespace lattice;

namespace {

ParamVector vec(std::initializer_list<double> v) {
  ParamVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LinearGaussianModel small_linear(std::size_t n, std::size_t d, std::uint64_t seed) {
  RandomStream s(seed);
  return make_synthetic_linear(n, d, 1.5, 1.0, s).model;
}

}  // namespace

TEST_CASE("sampler kind names round-trip") {
  for (auto k : {SamplerKind::sgld, SamplerKind::sglrw, SamplerKind::clipped_sgld})
    CHECK(parse_sampler_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_sampler_kind("langevin"), InvalidArgument);
}

TEST_CASE("lattice transition probabilities") {
  auto p = lrw_transition_prob(0.0, 0.1);
  CHECK(p.p_plus == 0.5);
  CHECK(p.p_minus == 0.5);
  p = lrw_transition_prob(1.0, 0.02);
  CHECK(p.p_plus == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(p.p_minus == doctest::Approx(0.55).epsilon(1e-14));
  p = lrw_transition_prob(5.0, 2.0);
  CHECK(p.p_plus == 0.0);
  CHECK(p.p_minus == 1.0);
  p = lrw_transition_prob(-5.0, 2.0);
  CHECK(p.p_plus == 1.0);
  CHECK(p.p_minus == 0.0);
  p = lrw_transition_prob(std::numeric_limits<double>::infinity(), 0.01);
  CHECK(p.p_minus == 1.0);
}

TEST_CASE("lattice probabilities sum to one and lie in [0,1]") {
  RandomStream s(1);
  for (int k = 0; k < 10000; ++k) {
    const double g = 20.0 * (s.uniform() - 0.5);
    const double step = std::exp(-10.0 * s.uniform());
    const auto p = lrw_transition_prob(g, step);
    CHECK(p.p_plus >= 0.0);
    CHECK(p.p_minus >= 0.0);
    CHECK(p.p_plus + p.p_minus == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("minibatch estimator: full batch equals the full gradient exactly") {
  const auto m = small_linear(9, 3, 2);
  std::vector<std::size_t> all(9);
  for (std::size_t i = 0; i < 9; ++i) all[i] = i;
  const ParamVector theta = vec({0.3, -0.2, 1.1});
  CHECK((minibatch_grad_estimate(m, theta, all) - m.full_gradient(theta)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("minibatch estimator is unbiased over all subsets") {
  const auto m = small_linear(4, 2, 3);
  const ParamVector theta = vec({0.7, -1.3});
  ParamVector avg = ParamVector::Zero(2);
  const auto subs = oracle::subsets(4, 2);
  for (const auto& s : subs) avg += minibatch_grad_estimate(m, theta, s);
  avg /= static_cast<double>(subs.size());
  const ParamVector full = m.full_gradient(theta);
  CHECK((avg - full).norm() <= 1e-12 * full.norm());
}

TEST_CASE("minibatch estimator with zero data terms is the prior gradient") {
  LinearGaussianModel m(RowMatrix::Zero(6, 2), Eigen::VectorXd::Zero(6), 1.0, 2.0);
  const ParamVector theta = vec({1.0, -3.0});
  const std::vector<std::size_t> batch{1, 4};
  CHECK((minibatch_grad_estimate(m, theta, batch) - 2.0 * theta).norm() < 1e-15);
  CHECK_THROWS_AS(minibatch_grad_estimate(m, theta, std::vector<std::size_t>{}), InvalidArgument);
  CHECK_THROWS_AS(minibatch_grad_estimate(m, theta, std::vector<std::size_t>{6}), InvalidArgument);
}

TEST_CASE("lattice step moves every coordinate by exactly sqrt(2 step)") {
  RandomStream s(4);
  const double step = 0.02;
  const double h = std::sqrt(2 * step);
  SamplerState st{ParamVector::Zero(5), 0, false};
  const ParamVector grad = vec({1.0, -2.0, 0.0, 50.0, -50.0});
  for (int k = 0; k < 100; ++k) {
    const auto next = sglrw_step(st, grad, step, s);
    CHECK(next.iteration == st.iteration + 1);
    CHECK(!next.diverged);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(next.params[i] - st.params[i]) == doctest::Approx(h).epsilon(1e-12));
    st = next;
  }
  // Saturated coordinates move deterministically against the gradient.
  SamplerState z{ParamVector::Zero(5), 0, false};
  const auto one = sglrw_step(z, grad, step, s);
  CHECK(one.params[3] == -h);
  CHECK(one.params[4] == h);
}

TEST_CASE("lattice step: zero-gradient mean increment vanishes") {
  RandomStream s(5);
  const double step = 0.01;
  const std::size_t n = 1000000;
  ParamVector p = ParamVector::Zero(1);
  const ParamVector g = ParamVector::Zero(1);
  for (std::size_t k = 0; k < n; ++k) sglrw_update(p, g, step, s);
  CHECK(std::abs(p[0] / n) < 3 * std::sqrt(2 * step) / 1000.0);
}

TEST_CASE("lattice step: mean increment equals -step grad") {
  RandomStream s(6);
  const double step = 0.02;
  const ParamVector g = vec({1.0, -3.0, 0.5});
  const std::size_t n = 1000000;
  ParamVector sum = ParamVector::Zero(3);
  ParamVector sumsq = ParamVector::Zero(3);
  for (std::size_t k = 0; k < n; ++k) {
    ParamVector p = ParamVector::Zero(3);
    sglrw_update(p, g, step, s);
    sum += p;
    sumsq += p.cwiseProduct(p);
  }
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double mean = sum[i] / n;
    const double se = std::sqrt((sumsq[i] / n - mean * mean) / n);
    CHECK(std::abs(mean + step * g[i]) < 3 * se);
    CHECK(sumsq[i] / n == doctest::Approx(2 * step).epsilon(1e-12));
  }
}

TEST_CASE("sgld step reproduces the update with recorded noise") {
  RandomStream s(7);
  RandomStream replay(7);
  const double step = 0.05;
  const ParamVector theta = vec({0.1, 2.0, -1.0});
  const ParamVector g = vec({3.0, -1.0, 0.25});
  const auto next = sgld_step(SamplerState{theta, 4, false}, g, step, s);
  CHECK(next.iteration == 5);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double xi = replay.normal();
    CHECK(next.params[i] == theta[i] + (-step * g[i] + std::sqrt(2 * step) * xi));
  }
}

TEST_CASE("sgld step flags divergence") {
  RandomStream s(8);
  const auto next =
      sgld_step(SamplerState{vec({1.0}), 0, false}, vec({std::numeric_limits<double>::infinity()}), 0.1, s);
  CHECK(next.diverged);
  const auto lrw =
      sglrw_step(SamplerState{vec({1.0}), 0, false}, vec({std::numeric_limits<double>::infinity()}), 0.1, s);
  CHECK(!lrw.diverged);
  CHECK(std::isfinite(lrw.params[0]));
}

TEST_CASE("sgld conditional moments with synthetic noise") {
  // E[dth] = -step g ; E[dth dth'] = 2 step I + step^2 (g g' + G).
  const Matrix l = (Matrix(2, 2) << 1.0, 0.0, 0.5, 0.8).finished();
  const Matrix g_cov = l * l.transpose();
  const SyntheticNoiseModel noise{l, NoiseSpec{}};
  const ParamVector g = vec({2.0, -1.0});
  const double step = 0.1;
  RandomStream s(9);
  const std::size_t n = 1000000;
  ParamVector sum = ParamVector::Zero(2);
  Matrix second = Matrix::Zero(2, 2);
  std::vector<double> s00;
  s00.reserve(n);
  Matrix sq = Matrix::Zero(2, 2);
  for (std::size_t k = 0; k < n; ++k) {
    ParamVector p = ParamVector::Zero(2);
    const ParamVector ghat = g + sample_synthetic_noise(s, noise);
    sgld_update(p, ghat, step, s);
    sum += p;
    const Matrix o = p * p.transpose();
    second += o;
    sq += o.cwiseProduct(o);
  }
  const ParamVector mean = sum / n;
  const Matrix m2 = second / n;
  const Matrix se2 = ((sq / n - m2.cwiseProduct(m2)) / n).cwiseSqrt();
  const Matrix expected = 2 * step * Matrix::Identity(2, 2) + step * step * (g * g.transpose() + g_cov);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double var = m2(i, i) - mean[i] * mean[i];
    CHECK(std::abs(mean[i] + step * g[i]) < 3 * std::sqrt(var / n));
    for (Eigen::Index j = 0; j < 2; ++j) CHECK(std::abs(m2(i, j) - expected(i, j)) < 3 * se2(i, j));
  }
}

TEST_CASE("clipped sgld equals sgld when the clip is inactive") {
  RandomStream a(10);
  RandomStream b(10);
  RandomStream gen(11);
  const double step = 0.01;
  for (int k = 0; k < 1000; ++k) {
    ParamVector theta(4);
    ParamVector g(4);
    for (auto& v : theta) v = gen.normal();
    for (auto& v : g) v = 14.0 * (gen.uniform() - 0.5);  // |step g| <= 0.07 < sqrt(0.02)
    const auto x = sgld_step(SamplerState{theta, 0, false}, g, step, a);
    const auto y = clipped_sgld_step(SamplerState{theta, 0, false}, g, step, b);
    CHECK(x.params == y.params);
  }
}

TEST_CASE("clipped sgld drift saturates at sqrt(2 step)") {
  const double step = 0.01;
  const double h = std::sqrt(2 * step);
  RandomStream a(12);
  RandomStream replay(12);
  const ParamVector g = vec({1e300, -1e300, std::numeric_limits<double>::infinity()});
  const auto next = clipped_sgld_step(SamplerState{ParamVector::Zero(3), 0, false}, g, step, a);
  const double x0 = replay.normal();
  const double x1 = replay.normal();
  const double x2 = replay.normal();
  CHECK(next.params[0] == -h + h * x0);
  CHECK(next.params[1] == h + h * x1);
  CHECK(next.params[2] == -h + h * x2);
  CHECK(!next.diverged);
}

TEST_CASE("clipped sgld drift magnitude never exceeds the bound") {
  RandomStream gen(13);
  for (int k = 0; k < 2000; ++k) {
    const double step = std::exp(-8.0 * gen.uniform());
    const ParamVector g = vec({1e3 * gen.normal(), gen.normal()});
    RandomStream a(static_cast<std::uint64_t>(k));
    RandomStream replay(static_cast<std::uint64_t>(k));
    const auto next = clipped_sgld_step(SamplerState{ParamVector::Zero(2), 0, false}, g, step, a);
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double drift = next.params[i] - std::sqrt(2 * step) * replay.normal();
      CHECK(std::abs(drift) <= std::sqrt(2 * step) * (1 + 1e-12));
    }
  }
}

TEST_CASE("model-based step overloads use the minibatch estimator") {
  const auto m = small_linear(10, 2, 14);
  const std::vector<std::size_t> batch{2, 7, 9};
  const ParamVector theta = vec({0.4, -0.6});
  const ParamVector ghat = minibatch_grad_estimate(m, theta, batch);
  RandomStream a(15);
  RandomStream b(15);
  CHECK(sgld_step(SamplerState{theta, 0, false}, m, batch, 0.01, a).params ==
        sgld_step(SamplerState{theta, 0, false}, ghat, 0.01, b).params);
  CHECK(sglrw_step(SamplerState{theta, 0, false}, m, batch, 0.01, a).params ==
        sglrw_step(SamplerState{theta, 0, false}, ghat, 0.01, b).params);
}

TEST_CASE("run_chain bookkeeping and determinism") {
  const auto m = small_linear(50, 3, 16);
  StepSchedule sched{1e-3, 0.55, ScheduleMode::decaying};
  ChainConfig cfg;
  cfg.n_chains = 1;
  cfg.n_iters = 40;
  cfg.burn_in = 15;
  cfg.retain = RetainPolicy::all_post_burnin;
  for (auto kind : {SamplerKind::sgld, SamplerKind::sglrw, SamplerKind::clipped_sgld}) {
    const auto a = run_chain(kind, m, sched, cfg, 8, 3);
    const auto b = run_chain(kind, m, sched, cfg, 8, 3);
    CHECK(a.samples.rows() == 25);
    CHECK(a.samples == b.samples);
    CHECK(!a.diverged);
  }
  cfg.retain = RetainPolicy::final_only;
  const auto f = run_chain(SamplerKind::sgld, m, sched, cfg, 8, 3);
  CHECK(f.samples.rows() == 1);
  cfg.retain = RetainPolicy::all_post_burnin;
  const auto all = run_chain(SamplerKind::sgld, m, sched, cfg, 8, 3);
  CHECK(all.samples.row(24) == f.samples.row(0));
}

TEST_CASE("sglrw chain stays on the lattice") {
  const auto m = small_linear(50, 2, 17);
  StepSchedule sched{0.01, 0.55, ScheduleMode::fixed};
  ChainConfig cfg;
  cfg.n_chains = 1;
  cfg.n_iters = 30;
  cfg.retain = RetainPolicy::all_post_burnin;
  const auto r = run_chain(SamplerKind::sglrw, m, sched, cfg, 5, 0);
  const double h = std::sqrt(0.02);
  for (Eigen::Index t = 0; t < r.samples.rows(); ++t)
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double units = r.samples(t, i) / h;
      CHECK(std::abs(units - std::round(units)) < 1e-9);
      CHECK(std::abs(std::round(units)) <= static_cast<double>(t + 1));
    }
}

TEST_CASE("parallel chains: thread-count independence and compositionality") {
  const auto m = small_linear(60, 3, 18);
  StepSchedule sched{1e-3, 0.55, ScheduleMode::decaying};
  ChainConfig cfg;
  cfg.n_chains = 12;
  cfg.n_iters = 50;
  cfg.burn_in = 10;
  cfg.master_seed = 99;
  cfg.retain = RetainPolicy::all_post_burnin;
  for (auto kind : {SamplerKind::sgld, SamplerKind::sglrw}) {
    cfg.threads = 1;
    const auto one = run_parallel_chains(kind, m, sched, cfg, 6);
    cfg.threads = 4;
    const auto many = run_parallel_chains(kind, m, sched, cfg, 6);
    REQUIRE(one.chains.size() == 12);
    for (std::size_t c = 0; c < 12; ++c) {
      CHECK(one.chains[c].samples == many.chains[c].samples);
      CHECK(one.chains[c].samples == run_chain(kind, m, sched, cfg, 6, c).samples);
    }
    CHECK(one.pooled_samples().rows() == 12 * 40);
  }
}

TEST_CASE("samplers see matched minibatches for the same seed and chain") {
  // With a zero step the states never move, so identical gradient streams
  // imply identical minibatch sequences. Compare the data stream directly.
  const auto m = small_linear(30, 2, 19);
  const auto source = GradientSource::minibatch(m, 5);
  auto e1 = source.make_estimator();
  auto e2 = source.make_estimator();
  RandomStream d1 = derive_chain_stream(7, 2).split(kDataStreamTag);
  RandomStream d2 = derive_chain_stream(7, 2).split(kDataStreamTag);
  ParamVector o1(2);
  ParamVector o2(2);
  for (int k = 0; k < 20; ++k) {
    e1(vec({0.1, 0.2}), d1, o1);
    e2(vec({-5.0, 3.0}), d2, o2);
    CHECK(d1.next_u64() == d2.next_u64());
  }
}

TEST_CASE("sglrw never reports divergence under heavy-tailed gradient noise") {
  const auto m = Mixture1DModel::default_target(NoiseSpec{NoiseFamily::alpha_stable, 1.1, 1.0});
  SyntheticNoiseModel noise{Matrix::Constant(1, 1, 50.0), m.noise()};
  const auto source = GradientSource::synthetic(m, noise);
  StepSchedule sched{0.05, 0.55, ScheduleMode::fixed};
  ChainConfig cfg;
  cfg.n_chains = 20;
  cfg.n_iters = 500;
  const auto r = run_parallel_chains(SamplerKind::sglrw, source, sched, cfg, ParamVector(ParamVector::Zero(1)));
  CHECK(r.diverged_count() == 0);
}

TEST_CASE("sgld divergence is recorded with its iteration") {
  Matrix a = Matrix::Identity(1, 1) * 100.0;
  QuadraticModel m(a, ParamVector::Zero(1));
  const auto source = GradientSource::synthetic(m, SyntheticNoiseModel{Matrix::Zero(1, 1), NoiseSpec{}});
  StepSchedule sched{0.5, 0.55, ScheduleMode::fixed};  // |1 - 50| > 1: explodes
  ChainConfig cfg;
  cfg.n_chains = 3;
  cfg.n_iters = 2000;
  const auto r = run_parallel_chains(SamplerKind::sgld, source, sched, cfg, ParamVector(ParamVector::Ones(1)));
  CHECK(r.diverged_count() == 3);
  CHECK(r.chains[0].divergence_iteration.has_value());
  CHECK(r.pooled_samples().rows() == 0);
  const auto lrw = run_parallel_chains(SamplerKind::sglrw, source, sched, cfg, ParamVector(ParamVector::Ones(1)));
  CHECK(lrw.diverged_count() == 0);
}

TEST_CASE("reference chain recovers a small linear posterior") {
  RandomStream s(20);
  auto synth = make_synthetic_linear(100, 3, 1.0, 1.0, s);
  const auto truth = linreg_analytic_posterior(synth.model);
  ReferenceOptions opt;
  opt.fine_step = 1e-4;
  opt.length = 100000;
  opt.burn_in = 5000;
  opt.thin = 5;
  RandomStream rs(21);
  const RowMatrix samples = reference_chain(synth.model, opt, rs, truth.mean);
  CHECK(samples.rows() == (100000 - 5000) / 5);
  // Independent oracle on the fitted moments.
  const Eigen::VectorXd mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  CHECK(oracle::gaussian_kl(mean, cov, truth.mean, truth.covariance) < 0.1);

  RandomStream again(21);
  CHECK(reference_chain(synth.model, opt, again, truth.mean) == samples);
}
