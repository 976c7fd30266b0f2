#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ewb/matrix.hpp"
#include "ewb/svm.hpp"

namespace ewb {

// Rows are samples. order_index gives the temporal order inside a block and
// must be unique within each (block, class).
struct LabeledFeatureSet {
  Matrix x;
  std::vector<int> y;
  std::vector<int> block_ids;
  std::vector<long> order_index;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return y.size(); }
  // Throws ParameterError when an invariant is broken.
  void validate() const;
  LabeledFeatureSet subset(const std::vector<std::size_t>& rows) const;
  LabeledFeatureSet select_columns(const std::vector<std::size_t>& cols) const;
};

// Averages consecutive runs of n_g same-class samples inside each block, in
// order_index order; a trailing shorter run becomes one sample. Output is
// ordered by (block, class, run) and order_index holds the run number.
LabeledFeatureSet group_samples(const LabeledFeatureSet& set, std::size_t n_g);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// One fold per distinct block id (ascending); that block is the test set.
std::vector<Split> cross_block_split(const LabeledFeatureSet& set);

// For repeat r the row order is shuffled with seed + r and cut into k folds
// whose sizes differ by at most one (the first n mod k folds are larger).
std::vector<Split> repeated_kfold_split(std::size_t n, std::size_t k, std::size_t repeats, std::uint64_t seed);

// Mean of sensitivity and specificity. Throws UndefinedMetricError when
// y_true holds a single class.
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Column means and standard deviations (population) of a training matrix.
// Zero-variance columns get scale 1 so they are only centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

enum class FeatureSpace { bp, mi, coh, all };
std::string to_string(FeatureSpace fs);
FeatureSpace parse_feature_space(const std::string& text);
// Column indices whose names belong to the space (prefix "bp_", "mi_", "coh_").
std::vector<std::size_t> feature_space_columns(const std::vector<std::string>& names, FeatureSpace fs);

enum class CvScheme { cross_block, kfold };
std::string to_string(CvScheme cv);
CvScheme parse_cv_scheme(const std::string& text);

struct Splitter {
  CvScheme scheme = CvScheme::cross_block;
  std::size_t k = 5;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;

  std::vector<Split> folds(const LabeledFeatureSet& set) const;
};

struct EvalOptions {
  SvmParams svm{};
  // When set, each fold keeps only the top percent of the feature-space
  // columns ranked by ANOVA F on that fold's grouped training data.
  std::optional<double> top_percent;
};

struct EvalResult {
  FeatureSpace feature_space = FeatureSpace::all;
  std::size_t n_g = 1;
  Splitter splitter{};
  std::optional<double> top_percent;
  // One entry per fold; empty when the fold's test set holds a single class.
  std::vector<std::optional<double>> fold_scores;
  double mean = 0.0;                 // mean of defined fold scores
  double pooled = 0.0;               // balanced accuracy over all test predictions
  std::size_t n_features = 0;        // columns in the feature space
  std::vector<std::string> feature_names;
  std::vector<std::size_t> train_sizes;  // grouped, per fold
  std::vector<std::size_t> test_sizes;

  std::string to_json() const;
  static EvalResult from_json(const std::string& text);
};

// Per fold: split, group train and test separately, select the feature-space
// columns, standardize with training statistics, optionally keep the top
// percent of features, train, predict and score. Folds run in parallel and
// are merged by index.
EvalResult evaluate(const LabeledFeatureSet& set, const Splitter& splitter, std::size_t n_g, FeatureSpace space,
                    const EvalOptions& options = {});

}  // namespace ewb
