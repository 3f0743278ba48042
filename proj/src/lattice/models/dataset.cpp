#include "lattice/models/dataset.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <vector>

#include "lattice/core/error.hpp"

namespace lattice {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ',' || std::isspace(static_cast<unsigned char>(line[pos])))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ',' && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw ConfigError("malformed number '" + line.substr(pos, end - pos) + "'", line_no);
    }
    values.push_back(v);
    pos = end;
  }
  return values;
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto row = parse_row(line, line_no);
    if (row.size() < 2) throw ConfigError("row needs at least one feature and a label", line_no);
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw ConfigError("expected " + std::to_string(width) + " columns, got " + std::to_string(row.size()), line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("dataset has no rows");
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  data.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    data.targets[static_cast<Eigen::Index>(i)] = rows[i][width - 1];
  }
  return data;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  try {
    return parse_dataset(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace lattice
