#include "ewb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <json.hpp>

#include "ewb/errors.hpp"
#include "ewb/parallel.hpp"
#include "ewb/random.hpp"
#include "ewb/ranking.hpp"

namespace ewb {

void LabeledFeatureSet::validate() const {
  const std::size_t n = y.size();
  if (x.rows() != n || block_ids.size() != n || order_index.size() != n)
    throw ParameterError("feature set: per-row fields have different lengths");
  if (feature_names.size() != x.cols()) throw ParameterError("feature set: feature name count does not match columns");
  std::set<std::tuple<int, int, long>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) throw ParameterError("feature set: labels must be 0 or 1");
    if (!seen.insert({block_ids[i], y[i], order_index[i]}).second)
      throw ParameterError("feature set: duplicate order index " + std::to_string(order_index[i]) + " in block " +
                           std::to_string(block_ids[i]));
  }
}

LabeledFeatureSet LabeledFeatureSet::subset(const std::vector<std::size_t>& rows) const {
  LabeledFeatureSet out;
  out.x = Matrix(rows.size(), x.cols());
  out.feature_names = feature_names;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = x.row(rows[r]);
    std::copy(src.begin(), src.end(), out.x.row(r).begin());
    out.y.push_back(y[rows[r]]);
    out.block_ids.push_back(block_ids[rows[r]]);
    out.order_index.push_back(order_index[rows[r]]);
  }
  return out;
}

LabeledFeatureSet LabeledFeatureSet::select_columns(const std::vector<std::size_t>& cols) const {
  LabeledFeatureSet out;
  out.x = Matrix(x.rows(), cols.size());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out.x(r, c) = x(r, cols[c]);
  for (auto c : cols) out.feature_names.push_back(feature_names[c]);
  out.y = y;
  out.block_ids = block_ids;
  out.order_index = order_index;
  return out;
}

LabeledFeatureSet group_samples(const LabeledFeatureSet& set, std::size_t n_g) {
  if (n_g == 0) throw ParameterError("group_samples: n_g must be at least 1");
  set.validate();
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < set.size(); ++i) cells[{set.block_ids[i], set.y[i]}].push_back(i);

  LabeledFeatureSet out;
  out.feature_names = set.feature_names;
  std::vector<double> values;
  const std::size_t d = set.x.cols();
  for (auto& [key, rows] : cells) {
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return set.order_index[a] < set.order_index[b]; });
    long run = 0;
    for (std::size_t start = 0; start < rows.size(); start += n_g, ++run) {
      const std::size_t stop = std::min(rows.size(), start + n_g);
      std::vector<double> acc(d, 0.0);
      for (std::size_t r = start; r < stop; ++r) {
        auto src = set.x.row(rows[r]);
        for (std::size_t c = 0; c < d; ++c) acc[c] += src[c];
      }
      const double count = static_cast<double>(stop - start);
      for (double& v : acc) values.push_back(v / count);
      out.block_ids.push_back(key.first);
      out.y.push_back(key.second);
      out.order_index.push_back(run);
    }
  }
  out.x = Matrix(out.y.size(), d, std::move(values));
  return out;
}

std::vector<Split> cross_block_split(const LabeledFeatureSet& set) {
  std::set<int> blocks(set.block_ids.begin(), set.block_ids.end());
  if (blocks.size() < 2) throw ParameterError("cross_block_split: need at least two distinct blocks");
  std::vector<Split> folds;
  for (int b : blocks) {
    Split s;
    for (std::size_t i = 0; i < set.size(); ++i) (set.block_ids[i] == b ? s.test : s.train).push_back(i);
    folds.push_back(std::move(s));
  }
  return folds;
}

std::vector<Split> repeated_kfold_split(std::size_t n, std::size_t k, std::size_t repeats, std::uint64_t seed) {
  if (k < 2) throw ParameterError("repeated_kfold_split: k must be at least 2");
  if (k > n) throw ParameterError("repeated_kfold_split: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  std::vector<Split> folds;
  for (std::size_t r = 0; r < repeats; ++r) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed + r);
    shuffle(std::span<std::size_t>(order), rng);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      Split s;
      s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                    order.begin() + static_cast<std::ptrdiff_t>(start + size));
      std::sort(s.test.begin(), s.test.end());
      std::vector<bool> in_test(n, false);
      for (auto i : s.test) in_test[i] = true;
      for (std::size_t i = 0; i < n; ++i)
        if (!in_test[i]) s.train.push_back(i);
      folds.push_back(std::move(s));
      start += size;
    }
  }
  return folds;
}

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw ParameterError("balanced_accuracy: length mismatch");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) (y_pred[i] == 1 ? tp : fn) += 1;
    else (y_pred[i] == 1 ? fp : tn) += 1;
  }
  if (tp + fn == 0 || tn + fp == 0) throw UndefinedMetricError("balanced_accuracy: y_true contains a single class");
  return (tp / (tp + fn) + tn / (tn + fp)) / 2.0;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += x(r, c);
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = x(r, c) - s.mean[c];
      var[c] += dv * dv;
    }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(n));
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  return out;
}

std::string to_string(FeatureSpace fs) {
  switch (fs) {
    case FeatureSpace::bp: return "bp";
    case FeatureSpace::mi: return "mi";
    case FeatureSpace::coh: return "coh";
    case FeatureSpace::all: return "all";
  }
  return {};
}

FeatureSpace parse_feature_space(const std::string& text) {
  if (text == "bp") return FeatureSpace::bp;
  if (text == "mi") return FeatureSpace::mi;
  if (text == "coh") return FeatureSpace::coh;
  if (text == "all") return FeatureSpace::all;
  throw ParameterError("unknown feature space '" + text + "' (expected bp, mi, coh or all)");
}

std::vector<std::size_t> feature_space_columns(const std::vector<std::string>& names, FeatureSpace fs) {
  const std::string prefix = fs == FeatureSpace::all ? "" : to_string(fs) + "_";
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i].rfind(prefix, 0) == 0) cols.push_back(i);
  if (cols.empty()) throw ParameterError("feature space '" + to_string(fs) + "' selects no columns");
  return cols;
}

std::string to_string(CvScheme cv) { return cv == CvScheme::cross_block ? "cross-block" : "kfold"; }

CvScheme parse_cv_scheme(const std::string& text) {
  if (text == "cross-block") return CvScheme::cross_block;
  if (text == "kfold") return CvScheme::kfold;
  throw ParameterError("unknown cross-validation scheme '" + text + "' (expected cross-block or kfold)");
}

std::vector<Split> Splitter::folds(const LabeledFeatureSet& set) const {
  if (scheme == CvScheme::cross_block) return cross_block_split(set);
  return repeated_kfold_split(set.size(), k, repeats, seed);
}

namespace {

struct FoldOutcome {
  std::optional<double> score;
  std::vector<int> truth;
  std::vector<int> predicted;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

FoldOutcome run_fold(const LabeledFeatureSet& set, const Split& split, std::size_t n_g,
                     const std::vector<std::size_t>& columns, const EvalOptions& options) {
  const auto train = group_samples(set.subset(split.train), n_g).select_columns(columns);
  const auto test = group_samples(set.subset(split.test), n_g).select_columns(columns);

  const auto scaler = Standardizer::fit(train.x);
  Matrix x_train = scaler.apply(train.x);
  Matrix x_test = scaler.apply(test.x);

  if (options.top_percent) {
    const auto scores = anova_f_scores(x_train, train.y, train.feature_names);
    const auto keep_names = select_top_percent(scores, *options.top_percent);
    std::vector<std::size_t> keep;
    for (const auto& name : keep_names)
      keep.push_back(static_cast<std::size_t>(
          std::find(train.feature_names.begin(), train.feature_names.end(), name) - train.feature_names.begin()));
    std::sort(keep.begin(), keep.end());
    auto pick = [&](const Matrix& m) {
      Matrix out(m.rows(), keep.size());
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) out(r, c) = m(r, keep[c]);
      return out;
    };
    x_train = pick(x_train);
    x_test = pick(x_test);
  }

  const auto model = train_rbf_classifier(x_train, train.y, options.svm);
  FoldOutcome out;
  out.truth = test.y;
  out.predicted = model.predict(x_test);
  out.train_size = train.size();
  out.test_size = test.size();
  try {
    out.score = balanced_accuracy(out.truth, out.predicted);
  } catch (const UndefinedMetricError&) {
    out.score.reset();
  }
  return out;
}

}  // namespace

EvalResult evaluate(const LabeledFeatureSet& set, const Splitter& splitter, std::size_t n_g, FeatureSpace space,
                    const EvalOptions& options) {
  set.validate();
  if (n_g == 0) throw ParameterError("evaluate: n_g must be at least 1");
  const auto columns = feature_space_columns(set.feature_names, space);
  const auto folds = splitter.folds(set);

  std::vector<FoldOutcome> outcomes(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) { outcomes[f] = run_fold(set, folds[f], n_g, columns, options); });

  EvalResult result;
  result.feature_space = space;
  result.n_g = n_g;
  result.splitter = splitter;
  result.top_percent = options.top_percent;
  result.n_features = columns.size();
  for (auto c : columns) result.feature_names.push_back(set.feature_names[c]);

  std::vector<int> all_truth, all_pred;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& o : outcomes) {
    result.fold_scores.push_back(o.score);
    result.train_sizes.push_back(o.train_size);
    result.test_sizes.push_back(o.test_size);
    if (o.score) {
      sum += *o.score;
      ++defined;
    }
    all_truth.insert(all_truth.end(), o.truth.begin(), o.truth.end());
    all_pred.insert(all_pred.end(), o.predicted.begin(), o.predicted.end());
  }
  result.pooled = balanced_accuracy(all_truth, all_pred);
  result.mean = defined > 0 ? sum / static_cast<double>(defined) : result.pooled;
  return result;
}

std::string EvalResult::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "ewb-eval-result";
  j["version"] = 1;
  j["feature_space"] = to_string(feature_space);
  j["n_g"] = n_g;
  j["seed"] = splitter.seed;
  nlohmann::ordered_json scores = nlohmann::ordered_json::array();
  for (const auto& s : fold_scores) scores.push_back(s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(nullptr));
  j["fold_scores"] = std::move(scores);
  j["mean"] = mean;
  nlohmann::ordered_json meta;
  meta["cv"] = to_string(splitter.scheme);
  if (splitter.scheme == CvScheme::kfold) {
    meta["k"] = splitter.k;
    meta["repeats"] = splitter.repeats;
  }
  meta["pooled_balanced_accuracy"] = pooled;
  meta["n_features"] = n_features;
  meta["top_percent"] = top_percent ? nlohmann::ordered_json(*top_percent) : nlohmann::ordered_json(nullptr);
  meta["train_sizes"] = train_sizes;
  meta["test_sizes"] = test_sizes;
  meta["feature_names"] = feature_names;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

EvalResult EvalResult::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "ewb-eval-result" || j.value("version", 0) != 1)
      throw SchemaError("eval result", 0, "format", "not an ewb-eval-result v1 document");
    EvalResult r;
    r.feature_space = parse_feature_space(j.at("feature_space").get<std::string>());
    r.n_g = j.at("n_g").get<std::size_t>();
    r.splitter.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("fold_scores"))
      r.fold_scores.push_back(s.is_null() ? std::optional<double>{} : std::optional<double>(s.get<double>()));
    r.mean = j.at("mean").get<double>();
    const auto& m = j.at("metadata");
    r.splitter.scheme = parse_cv_scheme(m.at("cv").get<std::string>());
    if (r.splitter.scheme == CvScheme::kfold) {
      r.splitter.k = m.at("k").get<std::size_t>();
      r.splitter.repeats = m.at("repeats").get<std::size_t>();
    }
    r.pooled = m.at("pooled_balanced_accuracy").get<double>();
    r.n_features = m.at("n_features").get<std::size_t>();
    if (!m.at("top_percent").is_null()) r.top_percent = m.at("top_percent").get<double>();
    r.train_sizes = m.at("train_sizes").get<std::vector<std::size_t>>();
    r.test_sizes = m.at("test_sizes").get<std::vector<std::size_t>>();
    r.feature_names = m.at("feature_names").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("eval result", 0, "", e.what());
  }
}

}  // namespace ewb
