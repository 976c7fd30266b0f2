#include <benchmark/benchmark.h>

#include <vector>

#include "ewb/coherence.hpp"
#include "ewb/features.hpp"
#include "ewb/fft.hpp"
#include "ewb/mutual_information.hpp"
#include "ewb/random.hpp"
#include "ewb/signal.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  ewb::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

ewb::Epoch noise_epoch(std::size_t n, std::uint64_t seed) {
  ewb::Epoch e;
  e.channel_labels = ewb::canonical_channels();
  e.sampling_rate_hz = 250.0;
  e.data = ewb::Matrix(7, n);
  ewb::Rng rng(seed);
  for (auto& v : e.data.data()) v = rng.normal();
  return e;
}

void BM_fft(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ewb::fft(std::span<const double>(x)));
}
// 250 = 2 * 5^3, 256 a power of two, 251 prime (direct-sum stage)
BENCHMARK(BM_fft)->Arg(250)->Arg(256)->Arg(251)->Arg(25000);

void BM_mutual_information(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 2);
  const auto y = noise(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ewb::mutual_information(x, y));
}
BENCHMARK(BM_mutual_information)->Arg(250)->Arg(100000);

void BM_msc_spectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 4);
  const auto y = noise(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(ewb::msc_spectrum(x, y, 250.0));
}
BENCHMARK(BM_msc_spectrum)->Arg(250)->Arg(25000);

void BM_extract_all_epoch(benchmark::State& state) {
  const auto e = noise_epoch(250, 6);
  for (auto _ : state) benchmark::DoNotOptimize(ewb::extract_all(e));
}
BENCHMARK(BM_extract_all_epoch);

void BM_extract_all_batch(benchmark::State& state) {
  std::vector<ewb::Epoch> epochs;
  for (std::uint64_t i = 0; i < 288; ++i) epochs.push_back(noise_epoch(250, 100 + i));
  for (auto _ : state) benchmark::DoNotOptimize(ewb::extract_all(epochs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(epochs.size()));
}
BENCHMARK(BM_extract_all_batch)->Unit(benchmark::kMillisecond);

void BM_bandpass(benchmark::State& state) {
  ewb::Matrix data(7, 60 * 250);
  ewb::Rng rng(7);
  for (auto& v : data.data()) v = rng.normal();
  const ewb::Recording rec(ewb::canonical_channels(), 250.0, std::move(data));
  for (auto _ : state) benchmark::DoNotOptimize(ewb::bandpass_filter(rec, 0.1, 50.0));
}
BENCHMARK(BM_bandpass)->Unit(benchmark::kMillisecond);

}  // namespace
