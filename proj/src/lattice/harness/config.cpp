#include "lattice/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <type_traits>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lattice/core/error.hpp"

namespace lattice {

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::linreg:
      return "linreg";
    case ExperimentKind::logreg:
      return "logreg";
    case ExperimentKind::heavy1d:
      return "heavy1d";
    case ExperimentKind::mse_sweep:
      return "mse_sweep";
    case ExperimentKind::moment_check:
      return "moment_check";
    case ExperimentKind::clip_constant:
      return "clip_constant";
  }
  return "unknown";
}

double ExperimentConfig::effective_prior_precision() const {
  if (prior_precision) return *prior_precision;
  return experiment == ExperimentKind::logreg ? 1.0 : 0.01;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string token;
  std::string body = value;
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = trim(body.substr(1, body.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  while (std::getline(ss, token, ',')) items.push_back(trim(token));
  return items;
}

template <class T>
T parse_number(const std::string& text, const std::string& key, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size()) return v;
  if constexpr (std::is_integral_v<T>) {
    // Integers may be written as 1e6.
    double d = 0.0;
    const auto [dptr, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (!text.empty() && dec == std::errc() && dptr == text.data() + text.size() && d >= 0.0 && d < 0x1p63 &&
        d == std::floor(d)) {
      return static_cast<T>(d);
    }
  }
  throw ConfigError("invalid value '" + text + "' for key '" + key + "'", line);
}

template <class T>
std::vector<T> parse_number_list(const std::string& text, const std::string& key, std::size_t line) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(item, key, line));
  if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value", line);
  return out;
}

bool parse_bool(const std::string& text, const std::string& key, std::size_t line) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for key '" + key + "'", line);
}

ExperimentKind parse_experiment(const std::string& text, std::size_t line) {
  static const std::map<std::string, ExperimentKind> kinds{
      {"linreg", ExperimentKind::linreg},       {"logreg", ExperimentKind::logreg},
      {"heavy1d", ExperimentKind::heavy1d},     {"mse_sweep", ExperimentKind::mse_sweep},
      {"moment_check", ExperimentKind::moment_check}, {"clip_constant", ExperimentKind::clip_constant}};
  const auto it = kinds.find(text);
  if (it == kinds.end()) throw ConfigError("unknown experiment '" + text + "'", line);
  return it->second;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&, std::size_t)>;

template <class T, class Field>
Setter number(Field field) {
  return [field](ExperimentConfig& c, const std::string& v, const std::string& k, std::size_t l) {
    c.*field = parse_number<T>(v, k, l);
  };
}

template <class T, class Field>
Setter number_list(Field field) {
  return [field](ExperimentConfig& c, const std::string& v, const std::string& k, std::size_t l) {
    c.*field = parse_number_list<T>(v, k, l);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"experiment", [](auto& c, const auto& v, const auto&, auto l) { c.experiment = parse_experiment(v, l); }},
      {"samplers",
       [](auto& c, const auto& v, const auto& k, auto l) {
         c.samplers.clear();
         for (const auto& item : split_list(v)) {
           try {
             c.samplers.push_back(parse_sampler_kind(item));
           } catch (const InvalidArgument& e) {
             throw ConfigError(e.what(), l);
           }
         }
         if (c.samplers.empty()) throw ConfigError("key '" + k + "' needs at least one value", l);
       }},
      {"batch_sizes", number_list<std::size_t>(&ExperimentConfig::batch_sizes)},
      {"base_steps", number_list<double>(&ExperimentConfig::base_steps)},
      {"schedule",
       [](auto& c, const auto& v, const auto&, auto l) {
         if (v == "decaying") {
           c.schedule = ScheduleMode::decaying;
         } else if (v == "fixed") {
           c.schedule = ScheduleMode::fixed;
         } else {
           throw ConfigError("schedule must be 'decaying' or 'fixed', got '" + v + "'", l);
         }
       }},
      {"decay_exponent", number<double>(&ExperimentConfig::decay_exponent)},
      {"d", number<std::size_t>(&ExperimentConfig::d)},
      {"N", number<std::size_t>(&ExperimentConfig::N)},
      {"n_chains", number<std::size_t>(&ExperimentConfig::n_chains)},
      {"n_iters", number<std::size_t>(&ExperimentConfig::n_iters)},
      {"burn_in", number<std::size_t>(&ExperimentConfig::burn_in)},
      {"retain",
       [](auto& c, const auto& v, const auto&, auto l) {
         if (v == "final_only") {
           c.retain = RetainPolicy::final_only;
         } else if (v == "all_post_burnin") {
           c.retain = RetainPolicy::all_post_burnin;
         } else {
           throw ConfigError("retain must be 'final_only' or 'all_post_burnin', got '" + v + "'", l);
         }
       }},
      {"seeds", number_list<std::uint64_t>(&ExperimentConfig::seeds)},
      {"threads", number<std::size_t>(&ExperimentConfig::threads)},
      {"init_spread", number<double>(&ExperimentConfig::init_spread)},
      {"data_seed", number<std::uint64_t>(&ExperimentConfig::data_seed)},
      {"data_file", [](auto& c, const auto& v, const auto&, auto) { c.data_file = v; }},
      {"noise_variance", number<double>(&ExperimentConfig::noise_variance)},
      {"feature_scale", number<double>(&ExperimentConfig::feature_scale)},
      {"prior_precision",
       [](auto& c, const auto& v, const auto& k, auto l) { c.prior_precision = parse_number<double>(v, k, l); }},
      {"class_separation", number<double>(&ExperimentConfig::class_separation)},
      {"reference_step", number<double>(&ExperimentConfig::reference_step)},
      {"reference_length", number<std::size_t>(&ExperimentConfig::reference_length)},
      {"reference_burn_in", number<std::size_t>(&ExperimentConfig::reference_burn_in)},
      {"reference_thin", number<std::size_t>(&ExperimentConfig::reference_thin)},
      {"noise_alpha", number<double>(&ExperimentConfig::noise_alpha)},
      {"noise_scales", number_list<double>(&ExperimentConfig::noise_scales)},
      {"mixture_weights", number_list<double>(&ExperimentConfig::mixture_weights)},
      {"mixture_means", number_list<double>(&ExperimentConfig::mixture_means)},
      {"mixture_stds", number_list<double>(&ExperimentConfig::mixture_stds)},
      {"tv_bins", number<std::size_t>(&ExperimentConfig::tv_bins)},
      {"repetitions", number<std::size_t>(&ExperimentConfig::repetitions)},
      {"n_samples", number<std::size_t>(&ExperimentConfig::n_samples)},
      {"moment_dim", number<std::size_t>(&ExperimentConfig::moment_dim)},
      {"moment_pairs", number<std::size_t>(&ExperimentConfig::moment_pairs)},
      {"moment_step", number<double>(&ExperimentConfig::moment_step)},
      {"moment_noise_var", number<double>(&ExperimentConfig::moment_noise_var)},
      {"output", [](auto& c, const auto& v, const auto&, auto) { c.output = v; }},
      {"record_runtime",
       [](auto& c, const auto& v, const auto& k, auto l) { c.record_runtime = parse_bool(v, k, l); }},
  };
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!samplers.empty(), "samplers must not be empty");
  require(!batch_sizes.empty(), "batch_sizes must not be empty");
  require(!base_steps.empty(), "base_steps must not be empty");
  require(!seeds.empty(), "seeds must not be empty");
  for (auto b : batch_sizes) require(b > 0, "batch sizes must be positive");
  for (auto s : base_steps) require(s > 0.0 && std::isfinite(s), "base steps must be positive");
  require(schedule == ScheduleMode::fixed || decay_exponent > 0.0, "decay_exponent must be positive");
  require(d > 0 && N > 0, "d and N must be positive");
  require(n_chains > 0 && n_iters > 0, "n_chains and n_iters must be positive");
  require(burn_in < n_iters, "burn_in must be smaller than n_iters");
  require(init_spread >= 0.0 && std::isfinite(init_spread), "init_spread must be non-negative");
  require(noise_variance > 0.0, "noise_variance must be positive");
  require(feature_scale > 0.0 && std::isfinite(feature_scale), "feature_scale must be positive");
  require(effective_prior_precision() > 0.0, "prior_precision must be positive");
  require(reference_step > 0.0 && reference_thin > 0 && reference_burn_in < reference_length,
          "reference chain settings are inconsistent");
  require(noise_alpha > 0.0 && noise_alpha <= 2.0, "noise_alpha must lie in (0, 2]");
  require(!noise_scales.empty(), "noise_scales must not be empty");
  for (auto s : noise_scales) require(s >= 0.0 && std::isfinite(s), "noise scales must be non-negative");
  require(mixture_weights.size() == mixture_means.size() && mixture_weights.size() == mixture_stds.size(),
          "mixture lists must have equal length");
  require(tv_bins > 0, "tv_bins must be positive");
  require(repetitions > 0, "repetitions must be positive");
  require(n_samples >= 2, "n_samples must be at least 2");
  if (experiment == ExperimentKind::clip_constant) require(n_samples >= 10000, "clip_constant needs n_samples >= 10000");
  require(moment_dim > 0 && moment_pairs > 0, "moment_dim and moment_pairs must be positive");
  require(moment_step > 0.0 && moment_noise_var >= 0.0, "moment_step must be positive, moment_noise_var >= 0");
  const bool uses_batches = experiment == ExperimentKind::linreg || experiment == ExperimentKind::logreg ||
                            experiment == ExperimentKind::mse_sweep;
  if (uses_batches && data_file.empty()) {
    for (auto b : batch_sizes) {
      require(b <= N, "batch size " + std::to_string(b) + " exceeds N = " + std::to_string(N));
    }
  }
  if (experiment == ExperimentKind::logreg) require(d >= 2, "logreg needs d >= 2 (intercept plus features)");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + content + "'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("key '" + key + "' has no value", line);
    it->second(config, value, key, line);
  }
  if (!seen.contains("experiment")) throw ConfigError("missing required key 'experiment'");
  config.validate();
  return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<GridPoint> enumerate_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> grid;
  switch (config.experiment) {
    case ExperimentKind::moment_check:
      return grid;
    case ExperimentKind::clip_constant:
      for (auto seed : config.seeds) grid.push_back({0, 0.0, 0.0, seed});
      return grid;
    case ExperimentKind::heavy1d:
      for (double scale : config.noise_scales)
        for (double step : config.base_steps)
          for (auto seed : config.seeds) grid.push_back({0, scale, step, seed});
      return grid;
    default:
      for (auto b : config.batch_sizes)
        for (double step : config.base_steps)
          for (auto seed : config.seeds) grid.push_back({b, 0.0, step, seed});
      return grid;
  }
}

}  // namespace lattice
