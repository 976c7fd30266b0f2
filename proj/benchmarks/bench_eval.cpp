#include <benchmark/benchmark.h>

#include <vector>

#include "ewb/eval.hpp"
#include "ewb/hypothesis.hpp"
#include "ewb/random.hpp"
#include "ewb/svm.hpp"

namespace {

ewb::LabeledFeatureSet gaussian_set(std::size_t blocks, std::size_t per_class, std::size_t d) {
  ewb::Rng rng(11);
  ewb::LabeledFeatureSet s;
  for (std::size_t c = 0; c < d; ++c) s.feature_names.push_back("bp_theta_c" + std::to_string(c));
  s.x = ewb::Matrix(blocks * per_class * 2, d);
  std::size_t r = 0;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < 2 * per_class; ++i, ++r) {
      const int y = static_cast<int>(i % 2);
      for (std::size_t c = 0; c < d; ++c) s.x(r, c) = rng.normal() + (y && c < d / 4 ? 0.4 : 0.0);
      s.y.push_back(y);
      s.block_ids.push_back(static_cast<int>(b));
      s.order_index.push_back(static_cast<long>(i));
    }
  return s;
}

void BM_svm_train(benchmark::State& state) {
  const auto s = gaussian_set(1, static_cast<std::size_t>(state.range(0)) / 2, 112);
  for (auto _ : state) benchmark::DoNotOptimize(ewb::train_rbf_classifier(s.x, s.y));
}
// 240 = one cross-block training fold at n_g = 1
BENCHMARK(BM_svm_train)->Arg(30)->Arg(240)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_evaluate_cross_block(benchmark::State& state) {
  const auto s = gaussian_set(6, 24, 112);
  const auto n_g = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ewb::evaluate(s, ewb::Splitter{}, n_g, ewb::FeatureSpace::all));
}
BENCHMARK(BM_evaluate_cross_block)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_bootstrap_f(benchmark::State& state) {
  ewb::Rng rng(12);
  std::vector<double> a(20), b(20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(ewb::paired_bootstrap_f_test(a, b, 10000, 1));
}
BENCHMARK(BM_bootstrap_f)->Unit(benchmark::kMillisecond);

void BM_wilcoxon_exact(benchmark::State& state) {
  ewb::Rng rng(13);
  std::vector<double> a(25), b(25);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(ewb::wilcoxon_signed_rank(a, b));
}
BENCHMARK(BM_wilcoxon_exact);

}  // namespace
