#include "lattice/diagnostics/histogram.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

std::size_t HistogramSummary::total() const noexcept {
  std::size_t n = outside;
  for (auto c : counts) n += c;
  return n;
}

void HistogramSummary::validate() const {
  if (bin_edges.size() < 2) throw InvalidArgument("histogram: need at least two edges");
  for (std::size_t b = 1; b < bin_edges.size(); ++b) {
    if (!(bin_edges[b] > bin_edges[b - 1])) throw InvalidArgument("histogram: edges must strictly increase");
  }
  if (counts.size() != bin_edges.size() - 1) throw InvalidArgument("histogram: counts/edges length mismatch");
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw InvalidArgument("histogram: need bins > 0 and hi > lo");
  std::vector<double> edges(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

HistogramSummary build_histogram(std::span<const double> samples, std::vector<double> edges) {
  HistogramSummary h;
  h.bin_edges = std::move(edges);
  h.counts.assign(h.bin_edges.size() < 2 ? 0 : h.bin_edges.size() - 1, 0);
  h.validate();
  const double lo = h.bin_edges.front();
  const double hi = h.bin_edges.back();
  for (double x : samples) {
    if (!std::isfinite(x) || x < lo || x > hi) {
      ++h.outside;
      continue;
    }
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
    auto bin = static_cast<std::size_t>(std::distance(h.bin_edges.begin(), it)) - 1;
    bin = std::min(bin, h.counts.size() - 1);
    ++h.counts[bin];
  }
  return h;
}

double histogram_tv_distance(std::span<const double> samples, const std::function<double(double)>& target_density,
                             const std::vector<double>& edges) {
  if (samples.empty()) throw InvalidArgument("histogram_tv_distance: no samples");
  const HistogramSummary h = build_histogram(samples, edges);
  const double n = static_cast<double>(samples.size());
  double inside_target = 0.0;
  double tv = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        target_density, h.bin_edges[b], h.bin_edges[b + 1], 10, 1e-12);
    inside_target += mass;
    tv += std::abs(static_cast<double>(h.counts[b]) / n - mass);
  }
  const double outside_target = std::max(0.0, 1.0 - inside_target);
  tv += std::abs(static_cast<double>(h.outside) / n - outside_target);
  return std::clamp(0.5 * tv, 0.0, 1.0);
}

}  // namespace lattice
