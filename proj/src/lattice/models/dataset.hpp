#pragma once

#include <istream>
#include <string>

#include "lattice/core/types.hpp"

namespace lattice {

/// A numeric table split into feature columns and a final label/target column.
struct Dataset {
  RowMatrix features;
  Eigen::VectorXd targets;
};

/// One row per line, fields separated by whitespace and/or commas, last column
/// is the label or target. Blank lines and lines starting with '#' are
/// skipped. Throws IoError for an unreadable file, ConfigError (with line
/// number) for malformed or ragged rows.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(std::istream& in);

}  // namespace lattice
