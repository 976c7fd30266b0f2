#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "ewb/matrix.hpp"
#include "ewb/random.hpp"
#include "ewb/signal.hpp"

namespace test_util {

inline std::vector<double> sinusoid(std::size_t n, double rate, double freq, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / rate + phase);
  return x;
}

inline std::vector<double> white(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  ewb::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sd * rng.normal();
  return x;
}

inline ewb::Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  ewb::Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

inline ewb::Epoch make_epoch(const std::vector<std::vector<double>>& rows, double rate,
                             std::vector<std::string> labels = ewb::canonical_channels()) {
  ewb::Epoch e;
  e.channel_labels = std::move(labels);
  e.data = rows_to_matrix(rows);
  e.sampling_rate_hz = rate;
  return e;
}

inline ewb::Epoch noise_epoch(std::size_t n, double rate, std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  for (std::size_t c = 0; c < 7; ++c) rows.push_back(white(n, seed * 31 + c));
  return make_epoch(rows, rate);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* base = std::getenv("EWB_TEST_TMP");
  std::filesystem::path p = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "ewb_tests";
  p /= name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace test_util
