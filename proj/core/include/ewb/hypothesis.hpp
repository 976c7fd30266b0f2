#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ewb {

struct TestResult {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> adjusted_p;
  std::optional<std::size_t> resamples;
  std::optional<std::uint64_t> seed;
  bool degenerate = false;
  bool exact = false;

  std::string to_json() const;
  static TestResult from_json(const std::string& text);
};

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
// dropped and tied magnitudes get mid-ranks. With at most 25 nonzero pairs
// the null distribution of W+ is enumerated exactly over all sign patterns;
// above that a tie- and continuity-corrected normal approximation is used.
// statistic = min(W+, W-). All-zero differences give p = 1 (degenerate).
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// Same test forced onto one path, for consistency checks.
TestResult wilcoxon_signed_rank_exact(std::span<const double> a, std::span<const double> b);
TestResult wilcoxon_signed_rank_normal(std::span<const double> a, std::span<const double> b);

// Sign-flip resampling test on paired differences d = a - b with statistic
// F = t^2, t = mean(d) / (sd(d) / sqrt(n)). Resample r flips each difference
// with bits drawn from a counter-based hash of (seed, r), so the result is
// independent of thread count. p = (1 + #{F* >= F}) / (1 + resamples).
TestResult paired_bootstrap_f_test(std::span<const double> a, std::span<const double> b,
                                   std::size_t resamples = 10000, std::uint64_t seed = 0);

// Benjamini-Hochberg step-up adjusted p-values, in input order.
std::vector<double> benjamini_hochberg(std::span<const double> p);

double normal_cdf(double z);

}  // namespace ewb
