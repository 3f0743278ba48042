#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lattice {

/// Counts of samples per bin [e_b, e_{b+1}); the last bin is closed on the
/// right. Samples outside the edges (and non-finite ones) are tallied in
/// `outside`.
struct HistogramSummary {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t outside = 0;

  std::size_t total() const noexcept;
  /// Throws InvalidArgument unless edges strictly increase and
  /// counts.size() == bin_edges.size() - 1.
  void validate() const;
};

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

HistogramSummary build_histogram(std::span<const double> samples, std::vector<double> edges);

/// Total-variation distance between the empirical histogram of `samples` and
/// a target density on the same bins: 1/2 sum_b |emp_b - target_b| plus the
/// mismatch of mass outside the edges. Target bin masses come from adaptive
/// Gauss-Kronrod quadrature; the target's outside mass is 1 minus their sum.
/// Result lies in [0, 1]. Throws InvalidArgument on empty samples.
double histogram_tv_distance(std::span<const double> samples, const std::function<double(double)>& target_density,
                             const std::vector<double>& edges);

}  // namespace lattice
