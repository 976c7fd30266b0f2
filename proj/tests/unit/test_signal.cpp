#include <doctest.h>

#include <cmath>

#include "ewb/butterworth.hpp"
#include "ewb/errors.hpp"
#include "ewb/signal.hpp"
#include "helpers.hpp"

using namespace ewb;
using test_util::rel_err;
using test_util::sinusoid;

namespace {

// Analytic squared magnitude of an order-n bilinear Butterworth.
double lowpass_gain2(double f, double fc, double fs, int n) {
  const double r = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
  return 1.0 / (1.0 + std::pow(r, 2 * n));
}
double highpass_gain2(double f, double fc, double fs, int n) {
  const double r = std::tan(std::numbers::pi * fc / fs) / std::tan(std::numbers::pi * f / fs);
  return 1.0 / (1.0 + std::pow(r, 2 * n));
}

Recording single_channel(const std::vector<double>& x, double rate, const std::string& label = "Fz") {
  return Recording({label}, rate, Matrix(1, x.size(), x));
}

double rms(std::span<const double> x, std::size_t from = 0, std::size_t to = 0) {
  if (to == 0) to = x.size();
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(to - from));
}

Recording two_channel(const std::vector<double>& a, const std::vector<double>& b, double rate) {
  std::vector<double> d(a);
  d.insert(d.end(), b.begin(), b.end());
  return Recording({"A", "B"}, rate, Matrix(2, a.size(), d));
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("butterworth responses match the analytic magnitude") {
  const double fs = 250.0;
  const auto lp = butterworth_lowpass(4, 50.0, fs);
  const auto hp = butterworth_highpass(4, 0.1, fs);
  for (double f : {0.01, 0.05, 0.1, 0.5, 1.0, 10.0, 25.0, 40.0, 50.0, 60.0, 100.0, 120.0}) {
    CAPTURE(f);
    CHECK(std::abs(std::norm(lp.response(f, fs)) - lowpass_gain2(f, 50.0, fs, 4)) < 1e-9);
    CHECK(std::abs(std::norm(hp.response(f, fs)) - highpass_gain2(f, 0.1, fs, 4)) < 1e-9);
  }
  CHECK(std::abs(std::norm(lp.response(50.0, fs)) - 0.5) < 1e-12);
  CHECK_THROWS_AS(butterworth_lowpass(3, 10.0, fs), ParameterError);
  CHECK_THROWS_AS(butterworth_lowpass(4, 125.0, fs), ParameterError);
}

TEST_CASE("band-pass keeps a 25 Hz sinusoid within 2%") {
  const double fs = 250.0;
  const auto x = sinusoid(25000, fs, 25.0);
  const auto y = bandpass_filter(single_channel(x, fs), 0.1, 50.0);
  const double expected = highpass_gain2(25.0, 0.1, fs, 4) * lowpass_gain2(25.0, 50.0, fs, 4);
  // Amplitude of the 25 Hz component in the middle 40 s; the edges carry a
  // slow start-up transient of the 0.1 Hz high-pass.
  double s = 0.0, c = 0.0;
  const std::size_t from = 5000, to = 15000;
  for (std::size_t t = from; t < to; ++t) {
    const double w = 2.0 * std::numbers::pi * 25.0 * static_cast<double>(t) / fs;
    s += y.data()(0, t) * std::sin(w);
    c += y.data()(0, t) * std::cos(w);
  }
  const double amp = 2.0 * std::hypot(s, c) / static_cast<double>(to - from);
  CHECK(std::abs(amp - expected) < 1e-3);
  CHECK(std::abs(amp - 1.0) < 0.02);
}

TEST_CASE("band-pass removes a 0.01 Hz drift") {
  const double fs = 250.0;
  const auto x = sinusoid(50000, fs, 0.01, 100.0, 0.4);
  const auto y = bandpass_filter(single_channel(x, fs), 0.1, 50.0);
  // Forward-backward squares the analytic gain: about 1e-8 at 0.01 Hz.
  CHECK(highpass_gain2(0.01, 0.1, fs, 4) < 1e-7);
  CHECK(rms(y.data().row(0)) < 0.1 * rms(x));
}

TEST_CASE("band-pass of zeros is zeros") {
  const auto y = bandpass_filter(single_channel(std::vector<double>(1000, 0.0), 250.0), 0.1, 50.0);
  for (double v : y.data().data()) CHECK(v == 0.0);
}

TEST_CASE("band-pass is linear") {
  const double fs = 250.0;
  const auto a = test_util::white(2000, 1);
  const auto b = test_util::white(2000, 2);
  std::vector<double> mix(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 2.5 * a[i] - 0.75 * b[i];
  const auto fa = bandpass_filter(single_channel(a, fs), 1.0, 40.0).data();
  const auto fb = bandpass_filter(single_channel(b, fs), 1.0, 40.0).data();
  const auto fm = bandpass_filter(single_channel(mix, fs), 1.0, 40.0).data();
  double scale = 0.0;
  for (double v : fm.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(fm(0, i) - (2.5 * fa(0, i) - 0.75 * fb(0, i))) <= 1e-9 * scale);
}

TEST_CASE("zero-phase filtering has no lag") {
  const double fs = 250.0;
  const auto x = sinusoid(2500, fs, 7.0);
  const auto y = bandpass_filter(single_channel(x, fs), 1.0, 40.0).data();
  int best_lag = 99;
  double best = -1e300;
  for (int lag = -10; lag <= 10; ++lag) {
    double c = 0.0;
    for (std::size_t i = 500; i < 2000; ++i) c += x[i] * y(0, static_cast<std::size_t>(static_cast<long>(i) + lag));
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("filtfilt rejects short input and band-pass bad parameters") {
  const auto bp = butterworth_bandpass(4, 0.1, 50.0, 250.0);
  CHECK(bp.pad_length() == 27);
  CHECK_THROWS_AS(bp.filtfilt(std::vector<double>(27, 1.0)), InsufficientDataError);
  CHECK_NOTHROW(bp.filtfilt(std::vector<double>(28, 1.0)));
  const auto rec = single_channel(std::vector<double>(500, 0.0), 250.0);
  CHECK_THROWS_AS(bandpass_filter(rec, 10.0, 5.0), ParameterError);
  CHECK_THROWS_AS(bandpass_filter(rec, 0.0, 5.0), ParameterError);
  CHECK_THROWS_AS(bandpass_filter(rec, 1.0, 125.0), ParameterError);
}

TEST_CASE("rereference subtracts the reference row") {
  const auto a = test_util::white(100, 3);
  const auto b = test_util::white(100, 4);
  const auto r = rereference(two_channel(a, b, 100.0), "B");
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(r.data()(0, i) == a[i] - b[i]);
    CHECK(r.data()(1, i) == 0.0);
  }
  REQUIRE(r.reference_label());
  CHECK(*r.reference_label() == "B");
  const auto twice = rereference(r, "B");
  CHECK(twice.data() == r.data());
  CHECK_THROWS_AS(rereference(r, "Cz"), LookupError);
}

TEST_CASE("rereference is linear") {
  const auto a = test_util::white(64, 5), b = test_util::white(64, 6);
  const auto c = test_util::white(64, 7), d = test_util::white(64, 8);
  std::vector<double> m1(64), m2(64);
  for (int i = 0; i < 64; ++i) {
    m1[i] = 2 * a[i] + 3 * c[i];
    m2[i] = 2 * b[i] + 3 * d[i];
  }
  const auto r1 = rereference(two_channel(a, b, 64.0), "B").data();
  const auto r2 = rereference(two_channel(c, d, 64.0), "B").data();
  const auto rm = rereference(two_channel(m1, m2, 64.0), "B").data();
  for (int i = 0; i < 64; ++i) CHECK(rm(0, i) == doctest::Approx(2 * r1(0, i) + 3 * r2(0, i)).epsilon(1e-12));
}

TEST_CASE("downsample keeps a 10 Hz sinusoid and checks the ratio") {
  const auto x = sinusoid(10000, 500.0, 10.0);
  const auto y = downsample(single_channel(x, 500.0), 250.0);
  CHECK(y.sampling_rate_hz() == 250.0);
  REQUIRE(y.n_samples() == 5000);
  const auto ref = sinusoid(5000, 250.0, 10.0);
  CHECK(std::abs(rms(y.data().row(0), 500, 4500) / rms(ref, 500, 4500) - 1.0) < 0.02);
  // Sample-wise agreement with the decimated input away from the edges.
  for (std::size_t i = 500; i < 4500; i += 37) CHECK(std::abs(y.data()(0, i) - ref[i]) < 0.02);

  const auto same = single_channel(test_util::white(300, 1), 250.0);
  CHECK(downsample(same, 250.0).data() == same.data());
  CHECK_THROWS_AS(downsample(same, 240.0), ParameterError);
}

TEST_CASE("extract_epochs cuts event-locked windows") {
  const double fs = 250.0;
  Matrix data(2, 20 * 250);
  for (std::size_t t = 0; t < data.cols(); ++t) {
    data(0, t) = static_cast<double>(t);
    data(1, t) = -static_cast<double>(t);
  }
  const Recording rec({"A", "B"}, fs, data);
  std::vector<EventMarker> events{{5.0, ClassLabel::high, 0}, {15.0, ClassLabel::low, 3}};
  const auto epochs = extract_epochs(rec, events, {-1.0, 0.0});
  REQUIRE(epochs.size() == 2);
  CHECK(epochs[0].n_samples() == 250);
  CHECK(epochs[1].n_samples() == 250);
  CHECK(epochs[0].data(0, 0) == 1000.0);
  CHECK(epochs[1].data(1, 249) == -3749.0);
  CHECK(epochs[0].class_label == ClassLabel::high);
  CHECK(epochs[1].class_label == ClassLabel::low);
  CHECK(epochs[1].block_id == 3);
  CHECK(epochs[0].onset_sec == doctest::Approx(4.0));

  CHECK(extract_epochs(rec, {}, {-1.0, 0.0}).empty());
  try {
    extract_epochs(rec, {{5.0, ClassLabel::low, 0}, {0.5, ClassLabel::low, 0}}, {-1.0, 0.0});
    FAIL("expected out-of-bounds");
  } catch (const OutOfBoundsError& e) {
    CHECK(e.events() == std::vector<std::size_t>{1});
  }
  CHECK_THROWS_AS(extract_epochs(rec, {{19.9, ClassLabel::low, 0}}, {0.0, 1.0}), OutOfBoundsError);
}

TEST_CASE("epochs are copies") {
  Matrix data(1, 1000, 1.0);
  Recording rec({"A"}, 250.0, data);
  auto epochs = extract_epochs(rec, {{2.0, ClassLabel::low, 0}}, {-1.0, 0.0});
  epochs[0].data(0, 0) = 42.0;
  CHECK(rec.data()(0, 250) == 1.0);
}

TEST_CASE("select_channels reorders, validates and is idempotent") {
  Matrix data(3, 4);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 4; ++t) data(c, t) = 10.0 * c + t;
  const Recording rec({"F3", "Fz", "Pz"}, 100.0, data);
  CHECK(select_channels(rec, {"F3", "Fz", "Pz"}).data() == rec.data());
  const auto sub = select_channels(rec, {"Fz", "F3"});
  CHECK(sub.channel_labels() == std::vector<std::string>{"Fz", "F3"});
  CHECK(sub.data()(0, 2) == 12.0);
  CHECK(sub.data()(1, 2) == 2.0);
  CHECK(select_channels(sub, {"Fz", "F3"}).data() == sub.data());
  CHECK_THROWS_AS(select_channels(rec, {"XX"}), LookupError);

  const auto ep = test_util::make_epoch({{1, 2}, {3, 4}}, 2.0, {"A", "B"});
  const auto ep2 = select_channels(ep, {"B"});
  CHECK(ep2.data(0, 1) == 4.0);
  CHECK_THROWS_AS(select_channels(ep, {"C"}), LookupError);
}

TEST_CASE("recording invariants are enforced") {
  CHECK_THROWS_AS(Recording({"A"}, 0.0, Matrix(1, 3)), ParameterError);
  CHECK_THROWS_AS(Recording({"A", "B"}, 10.0, Matrix(1, 3)), ParameterError);
  CHECK_THROWS_AS(Recording({"A", "A"}, 10.0, Matrix(2, 3)), ParameterError);
  CHECK_THROWS_AS(Recording({"A", "B"}, 10.0, Matrix(2, 3, 1.0), std::string("B")), ParameterError);
  const Recording ok({"A", "B"}, 10.0, Matrix(2, 20));
  CHECK(ok.duration_sec() == 2.0);
  CHECK(ok.channel_index("B") == 1);
  CHECK_THROWS_AS(ok.channel_index("C"), LookupError);
}

TEST_CASE("bands partition 1-13 Hz half-open") {
  const auto bands = canonical_bands();
  for (double f = 1.0; f < 13.0; f += 0.25) {
    int hits = 0;
    for (const auto& b : bands) hits += b.contains(f);
    CHECK(hits == 1);
  }
  CHECK_FALSE(delta_band().contains(4.0));
  CHECK(theta_band().contains(4.0));
}

}  // TEST_SUITE
