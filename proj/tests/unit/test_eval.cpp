#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ewb/errors.hpp"
#include "ewb/eval.hpp"
#include "ewb/features.hpp"
#include "ewb/svm.hpp"
#include "helpers.hpp"

using namespace ewb;

namespace {

// n_blocks blocks, per_class epochs of each class per block, class 1 shifted
// by `shift` in the first `informative` columns.
LabeledFeatureSet gaussian_set(std::size_t n_blocks, std::size_t per_class, std::size_t d, double shift,
                               std::size_t informative, std::uint64_t seed,
                               std::vector<std::string> names = {}) {
  Rng rng(seed);
  LabeledFeatureSet s;
  if (names.empty())
    for (std::size_t c = 0; c < d; ++c) names.push_back("f" + std::to_string(c));
  s.feature_names = names;
  const std::size_t n = n_blocks * per_class * 2;
  s.x = Matrix(n, d);
  std::size_t r = 0;
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t i = 0; i < 2 * per_class; ++i, ++r) {
      const int y = static_cast<int>(i % 2);
      for (std::size_t c = 0; c < d; ++c) s.x(r, c) = rng.normal() + (y == 1 && c < informative ? shift : 0.0);
      s.y.push_back(y);
      s.block_ids.push_back(static_cast<int>(b));
      s.order_index.push_back(static_cast<long>(i));
    }
  return s;
}

LabeledFeatureSet one_class(std::size_t n) {
  LabeledFeatureSet s;
  s.feature_names = {"v"};
  s.x = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    s.x(i, 0) = static_cast<double>(i + 1);
    s.y.push_back(1);
    s.block_ids.push_back(0);
    s.order_index.push_back(static_cast<long>(i));
  }
  return s;
}

Matrix two_clouds(std::vector<int>& y, std::size_t per_class, double gap, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(2 * per_class, 2);
  y.clear();
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 0 : 1;
    x(i, 0) = (label ? gap : -gap) + 0.1 * rng.normal();
    x(i, 1) = 0.1 * rng.normal();
    y.push_back(label);
  }
  return x;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("grouping ten samples by four gives runs of 4, 4 and 2") {
  const auto g = group_samples(one_class(10), 4);
  REQUIRE(g.size() == 3);
  CHECK(g.x(0, 0) == 2.5);
  CHECK(g.x(1, 0) == 6.5);
  CHECK(g.x(2, 0) == 9.5);
  CHECK(g.order_index == std::vector<long>{0, 1, 2});
}

TEST_CASE("grouping by one is the identity and by two averages pairs") {
  const auto s = gaussian_set(2, 5, 3, 0.0, 0, 1);
  const auto g1 = group_samples(s, 1);
  REQUIRE(g1.size() == s.size());
  // Output is ordered by (block, class, run); compare row by row through that order.
  std::size_t r = 0;
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y)
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s.block_ids[i] == b && s.y[i] == y) {
          for (std::size_t c = 0; c < 3; ++c) CHECK(g1.x(r, c) == s.x(i, c));
          ++r;
        }
  const auto two = one_class(2);
  const auto g2 = group_samples(two, 2);
  REQUIRE(g2.size() == 1);
  CHECK(g2.x(0, 0) == 1.5);
  CHECK_THROWS_AS(group_samples(two, 0), ParameterError);
}

TEST_CASE("grouping respects order_index, not row order") {
  auto s = one_class(4);
  s.order_index = {3, 2, 1, 0};
  const auto g = group_samples(s, 2);
  CHECK(g.x(0, 0) == 3.5);  // rows with order 0, 1 hold values 4, 3
  CHECK(g.x(1, 0) == 1.5);
}

TEST_CASE("grouping count and weighted-mean properties") {
  for (std::size_t n_c = 1; n_c <= 40; ++n_c)
    for (std::size_t n_g : {1u, 2u, 4u, 8u}) {
      auto s = one_class(n_c);
      Rng rng(n_c * 10 + n_g);
      for (std::size_t i = 0; i < n_c; ++i) s.x(i, 0) = rng.normal();
      const auto g = group_samples(s, n_g);
      CHECK(g.size() == (n_c + n_g - 1) / n_g);
      double orig = 0.0, weighted = 0.0;
      for (std::size_t i = 0; i < n_c; ++i) orig += s.x(i, 0);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double size = static_cast<double>(std::min(n_g, n_c - k * n_g));
        weighted += size * g.x(k, 0);
      }
      CHECK(std::abs(orig - weighted) < 1e-12 * std::max(1.0, std::abs(orig)) + 1e-12);
    }
}

TEST_CASE("cross-block folds: 6 blocks of 48") {
  const auto s = gaussian_set(6, 24, 2, 0.0, 0, 2);
  const auto folds = cross_block_split(s);
  REQUIRE(folds.size() == 6);
  std::vector<int> seen(s.size(), 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(folds[f].train.size() == 240);
    CHECK(folds[f].test.size() == 48);
    std::set<int> train_blocks, test_blocks;
    for (auto i : folds[f].train) train_blocks.insert(s.block_ids[i]);
    for (auto i : folds[f].test) {
      test_blocks.insert(s.block_ids[i]);
      ++seen[i];
    }
    CHECK(test_blocks == std::set<int>{static_cast<int>(f)});
    CHECK_FALSE(train_blocks.count(static_cast<int>(f)));
  }
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("cross-block folds: two blocks are complementary") {
  const auto s = gaussian_set(2, 3, 1, 0.0, 0, 3);
  const auto folds = cross_block_split(s);
  REQUIRE(folds.size() == 2);
  CHECK(folds[0].train == folds[1].test);
  CHECK(folds[1].train == folds[0].test);
  CHECK_THROWS_AS(cross_block_split(gaussian_set(1, 3, 1, 0.0, 0, 3)), ParameterError);
}

TEST_CASE("repeated k-fold sizes, partition and determinism") {
  auto sizes = [](const std::vector<Split>& folds) {
    std::vector<std::size_t> out;
    for (const auto& f : folds) out.push_back(f.test.size());
    return out;
  };
  CHECK(sizes(repeated_kfold_split(10, 5, 1, 0)) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(sizes(repeated_kfold_split(11, 5, 1, 0)) == std::vector<std::size_t>{3, 2, 2, 2, 2});
  const auto a = repeated_kfold_split(57, 5, 20, 9);
  const auto b = repeated_kfold_split(57, 5, 20, 9);
  REQUIRE(a.size() == 100);
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(a[f].test == b[f].test);
    CHECK(a[f].train.size() + a[f].test.size() == 57);
  }
  for (std::size_t r = 0; r < 20; ++r) {
    std::vector<int> seen(57, 0);
    for (std::size_t f = 0; f < 5; ++f)
      for (auto i : a[r * 5 + f].test) ++seen[i];
    for (int c : seen) CHECK(c == 1);
  }
  CHECK(repeated_kfold_split(57, 5, 1, 10)[0].test != a[0].test);
  CHECK_THROWS_AS(repeated_kfold_split(3, 5, 1, 0), ParameterError);
}

TEST_CASE("balanced accuracy") {
  CHECK(balanced_accuracy({1, 0, 1, 0}, {1, 0, 1, 0}) == 1.0);
  CHECK(balanced_accuracy({1, 0, 1, 0}, {1, 1, 1, 1}) == 0.5);
  CHECK(balanced_accuracy({1, 1, 0, 0}, {1, 0, 0, 0}) == 0.75);
  CHECK_THROWS_AS(balanced_accuracy({1, 1}, {1, 0}), UndefinedMetricError);
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> t, p;
    for (int i = 0; i < 20; ++i) {
      t.push_back(i < 10 ? static_cast<int>(rng.below(2)) : i % 2);
      p.push_back(static_cast<int>(rng.below(2)));
    }
    std::vector<int> ts(t), ps(p);
    for (auto& v : ts) v = 1 - v;
    for (auto& v : ps) v = 1 - v;
    CHECK(balanced_accuracy(t, p) == balanced_accuracy(ts, ps));
  }
}

TEST_CASE("standardizer uses training statistics") {
  Matrix x(4, 2, std::vector<double>{1, 5, 2, 5, 3, 5, 4, 5});
  const auto s = Standardizer::fit(x);
  CHECK(s.mean[0] == 2.5);
  CHECK(s.scale[0] == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.scale[1] == 1.0);
  const auto z = s.apply(x);
  CHECK(z(0, 1) == 0.0);
  CHECK(z(3, 0) == doctest::Approx(1.5 / std::sqrt(1.25)));
}

TEST_CASE("feature spaces select name prefixes") {
  const auto names = feature_names(canonical_channels());
  CHECK(feature_space_columns(names, FeatureSpace::all).size() == 112);
  CHECK(feature_space_columns(names, FeatureSpace::bp).size() == 21);
  CHECK(feature_space_columns(names, FeatureSpace::mi).size() == 28);
  CHECK(feature_space_columns(names, FeatureSpace::coh).size() == 63);
  CHECK(parse_feature_space("coh") == FeatureSpace::coh);
  CHECK_THROWS_AS(parse_feature_space("xx"), ParameterError);
  CHECK(parse_cv_scheme("kfold") == CvScheme::kfold);
  CHECK(to_string(CvScheme::cross_block) == "cross-block");
}

TEST_CASE("svm separates two clouds and predicts its support vectors") {
  std::vector<int> y;
  const auto x = two_clouds(y, 20, 3.0, 1);
  const auto model = train_rbf_classifier(x, y);
  CHECK(balanced_accuracy(y, model.predict(x)) == 1.0);
  REQUIRE(model.support_vectors().rows() > 0);
  for (std::size_t s = 0; s < model.support_vectors().rows(); ++s) {
    const double sign = model.coefficients()[s] > 0 ? 1.0 : -1.0;
    CHECK(model.decision_value(model.support_vectors().row(s)) * sign > 0.0);
  }
  CHECK_THROWS_AS(model.predict(Matrix(1, 3)), ParameterError);
}

TEST_CASE("svm tie rule, errors and iteration cap") {
  const SvmModel zero(Matrix(0, 2), {}, 0.0, 1.0, {1.0, 1.0});
  CHECK(zero.decision_value(std::vector<double>{0.3, 0.4}) == 0.0);
  CHECK(zero.predict(Matrix(1, 2)) == std::vector<int>{1});

  CHECK_THROWS_AS(train_rbf_classifier(Matrix(3, 1, 1.0), {1, 1, 1}), TrainingError);
  CHECK_THROWS_AS(train_rbf_classifier(Matrix(3, 1, 1.0), {1, 0}), ParameterError);
  std::vector<int> y;
  const auto x = two_clouds(y, 30, 0.05, 2);
  SvmParams p;
  p.max_iterations = 1;
  CHECK_THROWS_AS(train_rbf_classifier(x, y, p), ConvergenceError);
}

TEST_CASE("svm model survives serialization bit for bit") {
  std::vector<int> y;
  const auto x = two_clouds(y, 25, 0.3, 3);
  const auto model = train_rbf_classifier(x, y);
  const auto reloaded = SvmModel::from_json(model.to_json());
  CHECK(reloaded.decision_values(x) == model.decision_values(x));
  CHECK(reloaded.predict(x) == model.predict(x));
  CHECK(reloaded.to_json() == model.to_json());
  CHECK_THROWS_AS(SvmModel::from_json("{\"format\":\"other\"}"), SchemaError);
}

TEST_CASE("svm balanced weights make duplication a no-op away from the bounds") {
  std::vector<int> y;
  const auto x = two_clouds(y, 8, 1.0, 4);
  SvmParams p;
  p.c = 1e6;
  p.tolerance = 1e-12;
  p.gamma = 0.5;
  const auto a = train_rbf_classifier(x, y, p);
  Matrix xx(2 * x.rows(), x.cols());
  std::vector<int> yy;
  for (std::size_t r = 0; r < 2 * x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) xx(r, c) = x(r % x.rows(), c);
    yy.push_back(y[r % x.rows()]);
  }
  const auto b = train_rbf_classifier(xx, yy, p);
  Rng rng(5);
  Matrix probe(50, 2);
  for (auto& v : probe.data()) v = 2.0 * rng.normal();
  const auto da = a.decision_values(probe);
  const auto db = b.decision_values(probe);
  for (std::size_t i = 0; i < da.size(); ++i) CHECK(std::abs(da[i] - db[i]) < 1e-9);
}

TEST_CASE("svm on permuted labels is at chance") {
  Rng rng(6);
  LabeledFeatureSet s = gaussian_set(1, 100, 5, 0.0, 0, 7);
  std::vector<int> y = s.y;
  shuffle(std::span<int>(y), rng);
  s.y = y;
  for (std::size_t i = 0; i < s.size(); ++i) s.order_index[i] = static_cast<long>(i);
  Splitter sp;
  sp.scheme = CvScheme::kfold;
  sp.repeats = 4;
  sp.seed = 1;
  const auto r = evaluate(s, sp, 1, FeatureSpace::all);
  CHECK(r.mean >= 0.4);
  CHECK(r.mean <= 0.6);
}

TEST_CASE("evaluate groups after splitting and records metadata") {
  const auto names = feature_names(canonical_channels());
  const auto s = gaussian_set(6, 24, 112, 0.8, 10, 8, names);
  Splitter sp;
  const auto r = evaluate(s, sp, 8, FeatureSpace::all);
  REQUIRE(r.fold_scores.size() == 6);
  for (std::size_t f = 0; f < 6; ++f) {
    CHECK(r.train_sizes[f] == 5 * 2 * 3);
    CHECK(r.test_sizes[f] == 2 * 3);
    CHECK(r.fold_scores[f].has_value());
  }
  CHECK(r.n_features == 112);
  CHECK(r.mean > 0.8);

  const auto bp = evaluate(s, sp, 1, FeatureSpace::bp);
  CHECK(bp.n_features == 21);
  CHECK(bp.feature_names.front() == "bp_delta_F3");
  CHECK(bp.train_sizes[0] == 240);
  CHECK(bp.test_sizes[0] == 48);

  const auto again = evaluate(s, sp, 8, FeatureSpace::all);
  CHECK(again.to_json() == r.to_json());
  const auto back = EvalResult::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());
  CHECK(back.mean == r.mean);
}

TEST_CASE("evaluate with top-percent selection and k-fold") {
  const auto names = feature_names(canonical_channels());
  const auto s = gaussian_set(3, 20, 112, 1.0, 10, 9, names);
  EvalOptions o;
  o.top_percent = 10.0;
  Splitter sp;
  sp.scheme = CvScheme::kfold;
  sp.repeats = 2;
  const auto r = evaluate(s, sp, 1, FeatureSpace::all, o);
  CHECK(r.fold_scores.size() == 10);
  CHECK(r.top_percent == 10.0);
  CHECK(r.mean > 0.8);
  CHECK(EvalResult::from_json(r.to_json()).to_json() == r.to_json());
}

TEST_CASE("class-pure test blocks get a null fold score") {
  auto s = gaussian_set(4, 10, 4, 2.0, 4, 10);
  // Relabel so blocks 0 and 1 hold only class 0 and blocks 2 and 3 only class 1.
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.y[i] = s.block_ids[i] >= 2 ? 1 : 0;
    for (std::size_t c = 0; c < 4; ++c) s.x(i, c) = (s.y[i] ? 2.0 : 0.0) + 0.3 * std::sin(static_cast<double>(i * 7 + c));
  }
  const auto r = evaluate(s, Splitter{}, 1, FeatureSpace::all);
  for (const auto& f : r.fold_scores) CHECK_FALSE(f.has_value());
  CHECK(r.pooled == 1.0);
  CHECK(r.mean == r.pooled);
}

}  // TEST_SUITE
