#include "ewb/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ewb/errors.hpp"

namespace ewb {
namespace {

// Bin index per sample of x^2, or empty when x^2 is constant.
std::vector<std::size_t> bin_power(std::span<const double> x, std::size_t bins) {
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  const auto [lo_it, hi_it] = std::minmax_element(sq.begin(), sq.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return {};
  const double scale = static_cast<double>(bins) / (hi - lo);
  std::vector<std::size_t> idx(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    auto b = static_cast<std::size_t>((sq[i] - lo) * scale);
    idx[i] = std::min(b, bins - 1);
  }
  return idx;
}

// Plug-in entropy ln n - (1/n) sum c ln c. Counts are summed in sorted
// order so the result depends only on the multiset of counts; this makes
// MI(x, y) and MI(y, x) bit-identical and MI(x, x) equal to H(x).
double entropy_from_counts(std::vector<std::size_t> counts, std::size_t n) {
  std::sort(counts.begin(), counts.end());
  double s = 0.0;
  for (auto c : counts)
    if (c > 1) s += static_cast<double>(c) * std::log(static_cast<double>(c));
  const double total = static_cast<double>(n);
  return std::log(total) - s / total;
}

void check(std::span<const double> x, std::size_t bins) {
  if (bins < 2) throw ParameterError("mutual_information: need at least 2 bins");
  if (x.size() < bins)
    throw ParameterError("mutual_information: series length " + std::to_string(x.size()) + " below bin count " +
                         std::to_string(bins));
  for (double v : x)
    if (!std::isfinite(v)) throw ParameterError("mutual_information: non-finite sample");
}

}  // namespace

MutualInformation mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins) {
  if (x.size() != y.size())
    throw ParameterError("mutual_information: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  check(x, bins);
  const auto bx = bin_power(x, bins);
  const auto by = bin_power(y, bins);
  if (bx.empty() || by.empty()) return {0.0, true};

  const std::size_t n = x.size();
  std::vector<std::size_t> joint(bins * bins, 0), mx(bins, 0), my(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[bx[i] * bins + by[i]];
    ++mx[bx[i]];
    ++my[by[i]];
  }
  const double mi = entropy_from_counts(mx, n) + entropy_from_counts(my, n) - entropy_from_counts(joint, n);
  return {std::max(0.0, mi), false};
}

double power_entropy(std::span<const double> x, std::size_t bins) {
  check(x, bins);
  const auto bx = bin_power(x, bins);
  if (bx.empty()) return 0.0;
  std::vector<std::size_t> counts(bins, 0);
  for (auto b : bx) ++counts[b];
  return entropy_from_counts(std::move(counts), x.size());
}

}  // namespace ewb
