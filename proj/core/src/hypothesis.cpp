#include "ewb/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "ewb/errors.hpp"
#include "ewb/random.hpp"

namespace ewb {
namespace {

constexpr std::size_t kExactLimit = 25;

struct SignedRanks {
  std::vector<double> ranks;  // mid-ranks of |d|, nonzero d only
  std::vector<bool> positive;
  double tie_term = 0.0;      // sum (t^3 - t) over tie groups
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("wilcoxon: samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] - b[i];
    if (!std::isfinite(v)) throw ParameterError("wilcoxon: non-finite difference");
    if (v != 0.0) d.push_back(v);
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });

  SignedRanks out;
  out.ranks.resize(d.size());
  out.positive.resize(d.size());
  for (std::size_t i = 0; i < d.size();) {
    std::size_t j = i;
    while (j + 1 < d.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  for (std::size_t i = 0; i < d.size(); ++i) out.positive[i] = d[i] > 0.0;
  return out;
}

double positive_rank_sum(const SignedRanks& sr) {
  double w = 0.0;
  for (std::size_t i = 0; i < sr.ranks.size(); ++i)
    if (sr.positive[i]) w += sr.ranks[i];
  return w;
}

TestResult degenerate_result() {
  TestResult r;
  r.method = "wilcoxon_signed_rank";
  r.p_value = 1.0;
  r.degenerate = true;
  return r;
}

TestResult exact_path(const SignedRanks& sr) {
  // Distribution of 2*W+ over all 2^m equally likely sign patterns; doubled
  // mid-ranks are integers.
  std::vector<long> doubled;
  long total = 0;
  for (double r : sr.ranks) {
    doubled.push_back(std::lround(2.0 * r));
    total += doubled.back();
  }
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  long reach = 0;
  for (long r : doubled) {
    for (long s = reach; s >= 0; --s)
      if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
    reach += r;
  }
  const double patterns = std::ldexp(1.0, static_cast<int>(sr.ranks.size()));
  const double w = positive_rank_sum(sr);
  const long w2 = std::lround(2.0 * w);
  double lower = 0.0, upper = 0.0;
  for (long s = 0; s <= total; ++s) {
    if (s <= w2) lower += counts[static_cast<std::size_t>(s)];
    if (s >= w2) upper += counts[static_cast<std::size_t>(s)];
  }
  TestResult r;
  r.method = "wilcoxon_signed_rank";
  r.statistic = std::min(w, static_cast<double>(total) / 2.0 - w);
  r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
  r.exact = true;
  return r;
}

TestResult normal_path(const SignedRanks& sr) {
  const double m = static_cast<double>(sr.ranks.size());
  const double w = positive_rank_sum(sr);
  const double mean = m * (m + 1.0) / 4.0;
  const double var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - sr.tie_term / 48.0;
  TestResult r;
  r.method = "wilcoxon_signed_rank";
  r.statistic = std::min(w, m * (m + 1.0) / 2.0 - w);
  if (!(var > 0.0)) {
    r.p_value = 1.0;
    r.degenerate = true;
    return r;
  }
  const double dev = std::max(0.0, std::abs(w - mean) - 0.5);
  const double z = dev / std::sqrt(var);
  r.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
  return r;
}

void check_pvalue(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p-value " + std::to_string(p) + " outside [0, 1]");
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  if (sr.ranks.empty()) return degenerate_result();
  return sr.ranks.size() <= kExactLimit ? exact_path(sr) : normal_path(sr);
}

TestResult wilcoxon_signed_rank_exact(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  if (sr.ranks.empty()) return degenerate_result();
  if (sr.ranks.size() > 60) throw ParameterError("wilcoxon: exact path limited to 60 nonzero pairs");
  return exact_path(sr);
}

TestResult wilcoxon_signed_rank_normal(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  if (sr.ranks.empty()) return degenerate_result();
  return normal_path(sr);
}

TestResult paired_bootstrap_f_test(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                                   std::uint64_t seed) {
  if (a.size() != b.size()) throw ParameterError("paired_bootstrap_f_test: samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw ParameterError("paired_bootstrap_f_test: need at least two pairs");
  if (resamples == 0) throw ParameterError("paired_bootstrap_f_test: need at least one resample");

  std::vector<double> d(n);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    if (!std::isfinite(d[i])) throw ParameterError("paired_bootstrap_f_test: non-finite difference");
    sum_sq += d[i] * d[i];
  }
  const double nn = static_cast<double>(n);
  // F = t^2 from the signed sum; the sum of squares is invariant under flips.
  auto f_stat = [&](double signed_sum) {
    const double mean = signed_sum / nn;
    const double var = (sum_sq - nn * mean * mean) / (nn - 1.0);
    if (!(var > 0.0)) return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return mean * mean / (var / nn);
  };

  TestResult r;
  r.method = "paired_bootstrap_f";
  r.resamples = resamples;
  r.seed = seed;

  double observed_sum = 0.0;
  for (double v : d) observed_sum += v;
  const double mean = observed_sum / nn;
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  if (var == 0.0) {
    r.degenerate = true;
    r.statistic = mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.p_value = mean == 0.0 ? 1.0 : 1.0 / (1.0 + static_cast<double>(resamples));
    return r;
  }
  const double f_obs = f_stat(observed_sum);
  r.statistic = f_obs;

  const std::size_t words = (n + 63) / 64;
  std::size_t extreme = 0;
  for (std::size_t rep = 0; rep < resamples; ++rep) {
    double s = 0.0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = counter_hash(seed, rep * words + w);
      const std::size_t stop = std::min(n, (w + 1) * 64);
      for (std::size_t i = w * 64; i < stop; ++i, bits >>= 1) s += (bits & 1u) ? -d[i] : d[i];
    }
    if (f_stat(s) >= f_obs) ++extreme;
  }
  r.p_value = (1.0 + static_cast<double>(extreme)) / (1.0 + static_cast<double>(resamples));
  return r;
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
  for (double v : p) check_pvalue(v);
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    const std::size_t idx = order[rank - 1];
    running = std::min(running, p[idx] * static_cast<double>(m) / static_cast<double>(rank));
    // p * m / rank >= p holds exactly; the max only undoes rounding.
    adjusted[idx] = std::min(1.0, std::max(p[idx], running));
  }
  return adjusted;
}

std::string TestResult::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["statistic"] = std::isfinite(statistic) ? nlohmann::ordered_json(statistic) : nlohmann::ordered_json("inf");
  j["p"] = p_value;
  if (adjusted_p) j["adjusted_p"] = *adjusted_p;
  if (resamples) j["resamples"] = *resamples;
  if (seed) j["seed"] = *seed;
  j["degenerate"] = degenerate;
  if (method == "wilcoxon_signed_rank") j["exact"] = exact;
  return j.dump(2) + "\n";
}

TestResult TestResult::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TestResult r;
    r.method = j.at("method").get<std::string>();
    const auto& st = j.at("statistic");
    r.statistic = st.is_string() ? std::numeric_limits<double>::infinity() : st.get<double>();
    r.p_value = j.at("p").get<double>();
    check_pvalue(r.p_value);
    if (j.contains("adjusted_p")) r.adjusted_p = j.at("adjusted_p").get<double>();
    if (j.contains("resamples")) r.resamples = j.at("resamples").get<std::size_t>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
    r.degenerate = j.value("degenerate", false);
    r.exact = j.value("exact", false);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("test result", 0, "", e.what());
  }
}

}  // namespace ewb
