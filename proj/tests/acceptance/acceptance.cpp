#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "lattice/core/rng.hpp"
#include "lattice/diagnostics/moments.hpp"
#include "lattice/harness/config.hpp"
#include "lattice/harness/experiments.hpp"
#include "lattice/models/linear_gaussian.hpp"
#include "lattice/models/logistic.hpp"
#include "lattice/models/mixture1d.hpp"
#include "lattice/models/quadratic.hpp"
#include "lattice/samplers/step.hpp"

using namespace lattice;

namespace {

struct Verdict {
  bool pass = false;
  std::string measured;
};

struct Criterion {
  int id;
  std::string name;
  std::string tolerance;
  double time_limit_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Parsed CSV: header name -> column, rows of raw fields.
struct Table {
  std::map<std::string, std::size_t> col;
  std::vector<std::vector<std::string>> rows;

  const std::string& get(std::size_t r, const std::string& name) const { return rows[r].at(col.at(name)); }
  double num(std::size_t r, const std::string& name) const { return std::stod(get(r, name)); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto head = split(line);
  for (std::size_t i = 0; i < head.size(); ++i) t.col[head[i]] = i;
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

struct PresetRun {
  std::string csv;
  ExperimentOutcome outcome;
};

PresetRun run_preset(const ExperimentConfig& cfg) {
  std::ostringstream csv;
  std::ostringstream log;
  PresetRun r;
  r.outcome = run_experiment(cfg, csv, log);
  r.csv = csv.str();
  return r;
}

std::string g_presets;

ExperimentConfig preset(const std::string& name) {
  auto cfg = parse_config_file(g_presets + "/" + name + ".cfg");
  cfg.record_runtime = false;
  return cfg;
}

// Shared between criteria 2 and 4.
double g_moment_secs = 0.0;

Table& moment_table() {
  static Table t = [] {
    const auto t0 = std::chrono::steady_clock::now();
    Table parsed = parse_csv(run_preset(preset("moment_check")).csv);
    g_moment_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return parsed;
  }();
  return t;
}

std::string g_heavy_csv;

Verdict clip_constant() {
  RandomStream s(0);
  const auto est = clipped_increment_covariance_constant(1000000, s);
  const double closed = clipped_increment_constant_closed_form();
  const bool ok = std::abs(est.mean - 0.516) <= 0.002 && std::abs(closed - 0.51606) <= 1e-5;
  return {ok, "mc=" + fmt("%.6f", est.mean) + " closed=" + fmt("%.8f", closed)};
}

Verdict mn_oracle() {
  const Table& t = moment_table();
  std::size_t entries = 0, entry_fail = 0, diag_ok = 0, frob_ok = 0;
  double worst = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& check = t.get(r, "check");
    const bool pass = t.get(r, "status") == "PASS";
    if (check == "mn_entry") {
      ++entries;
      if (!pass) ++entry_fail;
      worst = std::max(worst, t.num(r, "abs_dev_se"));
    } else if (check == "mn_sglrw_diag_zero") {
      diag_ok += pass;
    } else if (check == "mn_frobenius_order") {
      frob_ok += pass;
    }
  }
  const bool ok = entries == 240 && entry_fail == 0 && diag_ok == 20 && frob_ok == 20;
  return {ok, "entries_outside_3se=" + std::to_string(entry_fail) + "/" + std::to_string(entries) +
                  " max_dev_se=" + fmt("%.3f", worst) + " diag_zero=" + std::to_string(diag_ok) +
                  "/20 frob_order=" + std::to_string(frob_ok) + "/20"};
}

Verdict lrw_moments() {
  const double step = 0.02;
  const double h = std::sqrt(2 * step);
  ParamVector g(4);
  g << 1.0, -3.0, 0.5, 0.0;
  RandomStream s(3);
  const std::size_t n = 2000000;
  ParamVector sum = ParamVector::Zero(4);
  ParamVector sumsq = ParamVector::Zero(4);
  bool exact = true;
  for (std::size_t k = 0; k < n; ++k) {
    ParamVector p = ParamVector::Zero(4);
    sglrw_update(p, g, step, s);
    for (Eigen::Index i = 0; i < 4; ++i) exact = exact && std::abs(p[i]) == h;
    sum += p;
    sumsq += p.cwiseProduct(p);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double mean = sum[i] / static_cast<double>(n);
    const double se = std::sqrt((sumsq[i] / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
    worst = std::max(worst, std::abs(mean + step * g[i]) / se);
  }
  const bool diag = exact && std::abs(h * h - 2 * step) <= 4 * std::numeric_limits<double>::epsilon() * 2 * step;
  return {worst < 3.0 && diag, "max_mean_dev_se=" + fmt("%.3f", worst) + " diag_exact=" + (diag ? "yes" : "no")};
}

Verdict third_moments() {
  const Table& t = moment_table();
  std::size_t cases = 0, fails = 0;
  double worst = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.get(r, "check") != "third_moment") continue;
    ++cases;
    if (t.get(r, "status") != "PASS") ++fails;
    worst = std::max(worst, t.num(r, "abs_dev_se"));
  }
  return {cases == 6 && fails == 0, "cases=" + std::to_string(cases) + " outside_3se=" + std::to_string(fails) +
                                        " max_dev_se=" + fmt("%.3f", worst) +
                                        " (shared moment_check run " + fmt("%.1f", g_moment_secs) + "s)"};
}

Verdict minibatch_unbiased() {
  RandomStream s(11);
  auto synth = make_synthetic_linear(6, 3, 1.0, 0.5, s);
  ParamVector theta(3);
  theta << 0.4, -1.1, 2.3;
  const auto subs = oracle::subsets(6, 2);
  ParamVector avg = ParamVector::Zero(3);
  for (const auto& b : subs) avg += minibatch_grad_estimate(synth.model, theta, b);
  avg /= static_cast<double>(subs.size());
  const ParamVector full = synth.model.full_gradient(theta);
  const double rel = (avg - full).norm() / full.norm();
  return {subs.size() == 15 && rel <= 1e-12, "subsets=" + std::to_string(subs.size()) + " rel=" + fmt("%.3e", rel)};
}

std::map<std::pair<std::string, std::size_t>, double> kl_by(const Table& t) {
  std::map<std::pair<std::string, std::size_t>, double> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out[{t.get(r, "sampler"), static_cast<std::size_t>(t.num(r, "batch_size"))}] = t.num(r, "kl_fit_true");
  }
  return out;
}

Verdict linreg_trend() {
  auto large = preset("linreg");
  large.samplers = {SamplerKind::sgld, SamplerKind::sglrw};
  large.batch_sizes = {8, 16, 32, 64};
  large.base_steps = {1e-3};
  auto small = large;
  small.batch_sizes = {500};
  small.base_steps = {1e-4};
  const auto kl_large = kl_by(parse_csv(run_preset(large).csv));
  const auto kl_small = kl_by(parse_csv(run_preset(small).csv));
  bool ok = true;
  std::string m;
  for (std::size_t b : large.batch_sizes) {
    const double a = kl_large.at({"sgld", b});
    const double l = kl_large.at({"sglrw", b});
    ok = ok && l < a;
    m += "B" + std::to_string(b) + ":" + fmt("%.3f", a) + "/" + fmt("%.3f", l) + " ";
  }
  const double a = kl_small.at({"sgld", 500});
  const double l = kl_small.at({"sglrw", 500});
  ok = ok && a < 0.3 && l < 0.3;
  m += "B500@1e-4:" + fmt("%.3f", a) + "/" + fmt("%.3f", l) + " (sgld/sglrw; reference B8 19.889/6.060)";
  return {ok, m};
}

Verdict mse_shape() {
  const Table t = parse_csv(run_preset(preset("mse_sweep")).csv);
  // (sampler, B) -> step -> mse
  std::map<std::pair<std::string, std::size_t>, std::map<double, double>> curve;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    curve[{t.get(r, "sampler"), static_cast<std::size_t>(t.num(r, "batch_size"))}][t.num(r, "step")] =
        t.num(r, "cov_mse");
  }
  bool ok = true;
  std::string m;
  for (std::size_t b : {8, 32, 128}) {
    const auto& sgld = curve.at({"sgld", b});
    const auto& lrw = curve.at({"sglrw", b});
    double sgld_min = std::numeric_limits<double>::infinity();
    for (const auto& [step, v] : sgld) sgld_min = std::min(sgld_min, v);
    const double sgld_ratio = sgld.rbegin()->second / sgld_min;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [step, v] : lrw) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double lrw_ratio = hi / lo;
    ok = ok && sgld_ratio >= 10.0 && lrw_ratio < 10.0;
    m += "B" + std::to_string(b) + ": sgld " + fmt("%.1f", sgld_ratio) + "x sglrw " + fmt("%.1f", lrw_ratio) + "x; ";
  }
  return {ok, m};
}

Verdict heavy_tail() {
  g_heavy_csv = run_preset(preset("heavy1d")).csv;
  const Table t = parse_csv(g_heavy_csv);
  double top = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) top = std::max(top, t.num(r, "noise_scale"));
  double tv_sgld = -1.0, tv_lrw = -1.0;
  std::size_t lrw_div = 0, samples_min = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& s = t.get(r, "sampler");
    if (s == "sglrw") lrw_div += static_cast<std::size_t>(t.num(r, "diverged_count"));
    if (t.num(r, "noise_scale") != top) continue;
    if (s == "sgld") tv_sgld = t.num(r, "tv_distance");
    if (s == "sglrw") tv_lrw = t.num(r, "tv_distance");
    if (s == "sgld" || s == "sglrw") {
      samples_min = std::min(samples_min, static_cast<std::size_t>(t.num(r, "n_samples")));
    }
  }
  const bool ok = tv_lrw >= 0.0 && tv_lrw < tv_sgld && lrw_div == 0 && samples_min >= 100000;
  return {ok, "scale=" + fmt("%g", top) + " tv_sgld=" + fmt("%.4f", tv_sgld) + " tv_sglrw=" + fmt("%.4f", tv_lrw) +
                  " sglrw_diverged=" + std::to_string(lrw_div) + " samples=" + std::to_string(samples_min)};
}

double fd_worst(const TargetModel& m, RandomStream& s, double scale) {
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    ParamVector theta(static_cast<Eigen::Index>(m.dim()));
    for (auto& v : theta) v = scale * s.normal();
    const auto fd = oracle::finite_difference([&](const Eigen::VectorXd& x) { return m.potential(x); }, theta);
    worst = std::max(worst, oracle::max_rel_diff(m.full_gradient(theta), fd));
  }
  return worst;
}

Verdict gradients() {
  RandomStream s(9);
  auto lin = make_synthetic_linear(200, 10, 1.5, 0.01, s);
  auto logit = make_synthetic_logistic(200, 10, 1.5, 1.0, s);
  const auto mix = Mixture1DModel::default_target();
  Matrix a = Matrix::Random(4, 4);
  QuadraticModel quad(a * a.transpose() + Matrix::Identity(4, 4), ParamVector::Ones(4));
  const double w_lin = fd_worst(lin.model, s, 0.5);
  const double w_log = fd_worst(logit, s, 1.0);
  const double w_mix = fd_worst(mix, s, 4.0);
  const double w_quad = fd_worst(quad, s, 2.0);
  const double worst = std::max({w_lin, w_log, w_mix, w_quad});
  return {worst < 1e-5, "linear=" + fmt("%.2e", w_lin) + " logistic=" + fmt("%.2e", w_log) +
                            " mixture=" + fmt("%.2e", w_mix) + " quadratic=" + fmt("%.2e", w_quad)};
}

Verdict determinism() {
  if (g_heavy_csv.empty()) g_heavy_csv = run_preset(preset("heavy1d")).csv;
  const std::string again = run_preset(preset("heavy1d")).csv;
  auto clip = preset("clip_constant");
  const std::string c1 = run_preset(clip).csv;
  const std::string c2 = run_preset(clip).csv;
  const bool ok = again == g_heavy_csv && c1 == c2 && !again.empty();
  return {ok, std::string("heavy1d ") + (again == g_heavy_csv ? "identical" : "differs") + ", clip_constant " +
                  (c1 == c2 ? "identical" : "differs") + " (" + std::to_string(again.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  app.add_option("--presets", g_presets, "preset directory")->required();
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "clip_constant", "|mc-0.516|<=0.002, |closed-0.51606|<=1e-5", 1, clip_constant},
      {2, "mn_oracle", "all entries within 3 SE, diag 0, frob 20/20", 300, mn_oracle},
      {3, "lrw_moments", "mean within 3 SE, |step|^2 == 2 delta", 30, lrw_moments},
      {4, "third_moments", "6 cases within 3 SE", 300, third_moments},
      {5, "minibatch_unbiased", "rel <= 1e-12", 1, minibatch_unbiased},
      {6, "linreg_trend", "KL sglrw<sgld B<=64 @1e-3, both <0.3 @1e-4", 600, linreg_trend},
      {7, "mse_shape", "sgld ratio>=10, sglrw ratio<10", 600, mse_shape},
      {8, "heavy_tail", "tv sglrw<sgld at top scale, 0 sglrw divergence", 120, heavy_tail},
      {9, "gradients", "max rel diff < 1e-5", 5, gradients},
      {10, "determinism", "byte-identical CSV", 600, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.pass && secs < c.time_limit_s && (c.id != 4 || g_moment_secs < c.time_limit_s);
    failed += !pass;
    std::printf("%s %2d %-18s %s | tol: %s | runtime %.2fs (limit %.0fs)\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), v.measured.c_str(), c.tolerance.c_str(), secs, c.time_limit_s);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
