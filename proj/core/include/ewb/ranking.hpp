#pragma once

#include <string>
#include <vector>

#include "ewb/matrix.hpp"

namespace ewb {

struct FeatureScore {
  std::string feature_name;
  double f_value = 0.0;  // +infinity when classes separate with zero within-group spread
};

// Two-group one-way ANOVA F per column:
// (between SS / 1) / (within SS / (n - 2)). Both classes need two samples.
// Zero within SS gives 0 if the group means agree and +infinity otherwise.
std::vector<FeatureScore> anova_f_scores(const Matrix& x, const std::vector<int>& y,
                                         const std::vector<std::string>& names);

// The ceil(pct * d / 100) highest scores; equal scores keep input order.
std::vector<std::string> select_top_percent(const std::vector<FeatureScore>& scores, double pct);

// Element-wise mean of score lists with identical feature order (for
// example one list per subject).
std::vector<FeatureScore> average_scores(const std::vector<std::vector<FeatureScore>>& per_subject);

}  // namespace ewb
