#include "ewb/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ewb/errors.hpp"

namespace ewb {

std::vector<FeatureScore> anova_f_scores(const Matrix& x, const std::vector<int>& y,
                                         const std::vector<std::string>& names) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw ParameterError("anova_f_scores: label count does not match rows");
  if (names.size() != x.cols()) throw ParameterError("anova_f_scores: name count does not match columns");
  std::size_t n1 = 0;
  for (int v : y) n1 += (v == 1);
  const std::size_t n0 = n - n1;
  if (n0 < 2 || n1 < 2) throw ParameterError("anova_f_scores: each class needs at least two samples");

  std::vector<FeatureScore> out;
  out.reserve(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t r = 0; r < n; ++r) (y[r] == 1 ? s1 : s0) += x(r, c);
    const double m0 = s0 / static_cast<double>(n0);
    const double m1 = s1 / static_cast<double>(n1);
    const double grand = (s0 + s1) / static_cast<double>(n);
    double within = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = x(r, c) - (y[r] == 1 ? m1 : m0);
      within += d * d;
    }
    const double between = static_cast<double>(n0) * (m0 - grand) * (m0 - grand) +
                           static_cast<double>(n1) * (m1 - grand) * (m1 - grand);
    double f = 0.0;
    if (within > 0.0) {
      f = between / (within / static_cast<double>(n - 2));
    } else if (m0 != m1) {
      f = std::numeric_limits<double>::infinity();
    }
    out.push_back({names[c], f});
  }
  return out;
}

std::vector<std::string> select_top_percent(const std::vector<FeatureScore>& scores, double pct) {
  if (scores.empty()) throw ParameterError("select_top_percent: empty score list");
  if (!(pct > 0.0 && pct <= 100.0)) throw ParameterError("select_top_percent: percent must be in (0, 100]");
  const double d = static_cast<double>(scores.size());
  // pct * d / 100 rounded up, tolerant of representation error in pct.
  auto keep = static_cast<std::size_t>(std::ceil(pct * d / 100.0 - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, scores.size());

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].f_value > scores[b].f_value; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < keep; ++i) out.push_back(scores[order[i]].feature_name);
  return out;
}

std::vector<FeatureScore> average_scores(const std::vector<std::vector<FeatureScore>>& per_subject) {
  if (per_subject.empty()) throw ParameterError("average_scores: no score lists");
  std::vector<FeatureScore> out = per_subject.front();
  for (std::size_t s = 1; s < per_subject.size(); ++s) {
    if (per_subject[s].size() != out.size()) throw ParameterError("average_scores: score lists differ in length");
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (per_subject[s][i].feature_name != out[i].feature_name)
        throw ParameterError("average_scores: feature order differs at '" + out[i].feature_name + "'");
      out[i].f_value += per_subject[s][i].f_value;
    }
  }
  for (auto& f : out) f.f_value /= static_cast<double>(per_subject.size());
  return out;
}

}  // namespace ewb
