#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "latticewalk/latticewalk.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int report(lw_status status) {
  std::fprintf(stderr, "latticewalk: %s: %s\n", lw_status_string(status), lw_last_error());
  return status == LW_CONFIG_ERROR ? kExitConfig : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-gradient Langevin and lattice random-walk experiment runner"};
  app.set_version_flag("--version", lw_version());

  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool no_runtime = false;

  app.add_option("config", config_path, "Experiment config file (key = value lines)")->required();
  app.add_option("--out,-o", out_path, "CSV output path, '-' for stdout (overrides config 'output')");
  app.add_option("--seed", seed, "Run a single seed (overrides config 'seeds')");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores (overrides config 'threads')");
  app.add_flag("--no-runtime", no_runtime, "Write runtime_s as 0 for byte-reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  lw_config* config = nullptr;
  lw_status status = lw_config_load(config_path.c_str(), &config);
  if (status != LW_OK) {
    std::fprintf(stderr, "latticewalk: %s: %s\n", lw_status_string(status), lw_last_error());
    return status == LW_IO_ERROR || status == LW_CONFIG_ERROR ? kExitConfig : kExitRuntime;
  }

  if (out_path) status = lw_config_set_output(config, out_path->c_str());
  if (status == LW_OK && seed) status = lw_config_set_seed(config, *seed);
  if (status == LW_OK && threads) status = lw_config_set_threads(config, *threads);
  if (status == LW_OK && no_runtime) status = lw_config_set_record_runtime(config, 0);

  if (status == LW_OK) {
    const std::string output = lw_config_output(config);
    std::size_t rows = 0;
    status = lw_experiment_run(config, output.empty() ? nullptr : output.c_str(), &rows);
    if (status == LW_OK) std::fprintf(stderr, "latticewalk: %s wrote %zu rows\n", lw_config_experiment(config), rows);
  }
  lw_config_destroy(config);
  return status == LW_OK ? 0 : report(status);
}
