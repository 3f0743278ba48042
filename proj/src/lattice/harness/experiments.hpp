#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "lattice/harness/config.hpp"

namespace lattice {

/// Column layout of the CSV written for each experiment. The linreg header
/// is fixed; the others follow the same conventions (identifiers first,
/// metrics next, diverged_count and runtime_s last where applicable).
std::vector<std::string> csv_header(ExperimentKind kind);

struct ExperimentOutcome {
  std::size_t rows = 0;
  /// Only meaningful for moment_check and clip_constant: every built-in
  /// assertion held.
  bool checks_passed = true;
};

/// Runs the whole grid and writes the header plus one row per
/// (sampler, grid point) to `csv` in grid order. Progress and divergence
/// warnings go to `log`. Throws ConfigError for config/model mismatches,
/// IoError for unreadable data files, other lattice::Error on runtime failure.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream& csv, std::ostream& log);

/// Fixed CSV number formatting: %.10g, with inf/nan spelled "inf", "-inf", "nan".
std::string format_number(double value);

}  // namespace lattice
