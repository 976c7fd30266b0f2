#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ewb/dynamics.hpp"
#include "ewb/errors.hpp"
#include "ewb/eval.hpp"
#include "ewb/formats.hpp"
#include "ewb/ranking.hpp"
#include "ewb/signature.hpp"
#include "ewb/synth.hpp"
#include "helpers.hpp"

using namespace ewb;

namespace {

struct SynthFeatures {
  SynthDataset data;
  std::vector<Epoch> epochs;
  std::vector<FeatureVector> features;
};

SynthFeatures synth_features(const SynthConfig& config) {
  SynthFeatures s{generate(config), {}, {}};
  s.epochs = extract_epochs(s.data.recording, s.data.events, {-config.epoch_sec, 0.0});
  s.features = extract_all(s.epochs);
  return s;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

// HIGH minus LOW difference of a per-epoch quantity with its standard error.
MeanSe class_difference(const std::vector<Epoch>& epochs, const std::vector<double>& value) {
  std::vector<double> hi, lo;
  for (std::size_t i = 0; i < epochs.size(); ++i)
    (epochs[i].class_label == ClassLabel::high ? hi : lo).push_back(value[i]);
  const auto a = mean_se(hi);
  const auto b = mean_se(lo);
  return {a.mean - b.mean, std::hypot(a.se, b.se)};
}

std::vector<double> column(const std::vector<FeatureVector>& fv, const std::string& name) {
  std::vector<double> v;
  for (const auto& f : fv) v.push_back(f.at(name));
  return v;
}

SubjectSeries series(std::vector<double> values) {
  SubjectSeries s;
  s.times_sec = step_grid(-1.0, 1.0, 0.2);
  s.values = std::move(values);
  return s;
}

Recording stationary_recording(std::size_t n, double rate, std::uint64_t seed) {
  Matrix data(7, n);
  for (std::size_t c = 0; c < 7; ++c) {
    const auto noise = pink_noise(n, rate, 1.0, seed * 17 + c);
    for (std::size_t t = 0; t < n; ++t) data(c, t) = 10.0 * noise[t];
  }
  return Recording(canonical_channels(), rate, std::move(data));
}

std::vector<EventMarker> regular_events(double first, double spacing, std::size_t count) {
  std::vector<EventMarker> ev;
  for (std::size_t i = 0; i < count; ++i)
    ev.push_back({first + spacing * static_cast<double>(i), i % 2 ? ClassLabel::high : ClassLabel::low, 0});
  return ev;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("step grid") {
  const auto g = step_grid(-1.0, 1.0, 0.2);
  REQUIRE(g.size() == 11);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == -1.0 + static_cast<double>(i) * 0.2);
  CHECK(std::abs(g[5]) < 1e-12);
  CHECK(step_grid(0.0, 0.0, 0.5).size() == 1);
  CHECK_THROWS_AS(step_grid(0.0, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(step_grid(1.0, 0.0, 0.1), ParameterError);
}

TEST_CASE("periodic recording gives a flat course") {
  // Integer-Hz tones fill every 1 s window with whole cycles, so every window
  // has the same spectrum whatever its start.
  const double rate = 250.0;
  const std::size_t n = 20 * 250;
  Matrix data(7, n);
  for (std::size_t c = 0; c < 7; ++c) {
    const auto a = test_util::sinusoid(n, rate, 6.0, 5.0 + c, 0.3 * c);
    const auto b = test_util::sinusoid(n, rate, 2.0, 3.0, 0.1 * c);
    const auto d = test_util::sinusoid(n, rate, 10.0, 1.0 + 0.5 * c);
    for (std::size_t t = 0; t < n; ++t) data(c, t) = a[t] + b[t] + d[t];
  }
  const Recording rec(canonical_channels(), rate, std::move(data));
  const auto s = signature_time_course(rec, regular_events(4.0, 3.0, 4), literature_signature_def());
  REQUIRE(s.values.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(s.events_used[i] == 4);
    CHECK(std::abs(s.values[i] - s.values[0]) < 1e-9);
  }
}

TEST_CASE("windows leaving the recording are skipped") {
  const auto rec = stationary_recording(10 * 250, 250.0, 1);
  std::vector<EventMarker> ev{{0.6, ClassLabel::high, 0}, {5.0, ClassLabel::high, 0}};
  const auto s = signature_time_course(rec, ev, literature_signature_def());
  CHECK(s.events_used.front() == 1);
  CHECK(s.events_skipped.front() == 1);
  CHECK(s.events_used.back() == 2);
  std::vector<EventMarker> none{{0.1, ClassLabel::high, 0}};
  const auto t = signature_time_course(rec, none, literature_signature_def());
  CHECK(std::isnan(t.values.front()));
}

TEST_CASE("aggregate examples") {
  std::vector<double> v(11);
  for (std::size_t i = 0; i < 11; ++i) v[i] = 0.5 * static_cast<double>(i) - 1.0;

  const auto one = aggregate_subjects({series(v)});
  CHECK(one.mean == v);
  CHECK(one.std_err == std::vector<double>(11, 0.0));
  CHECK(one.n_subjects == std::vector<std::size_t>(11, 1));

  std::vector<double> neg(v);
  for (auto& x : neg) x = -x;
  const auto pm = aggregate_subjects({series(v), series(neg)});
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(pm.mean[i] == 0.0);
    CHECK(pm.std_err[i] == doctest::Approx(std::abs(v[i])));
  }

  const auto same = aggregate_subjects({series(v), series(v), series(v)});
  CHECK(same.mean == v);
  CHECK(same.std_err == std::vector<double>(11, 0.0));

  auto gap = v;
  gap[3] = std::numeric_limits<double>::quiet_NaN();
  const auto missing = aggregate_subjects({series(gap), series(v)});
  CHECK(missing.n_subjects[3] == 1);
  CHECK(missing.mean[3] == v[3]);
  CHECK(missing.n_subjects[4] == 2);

  auto other = series(v);
  other.times_sec = step_grid(-1.0, 1.0, 0.25);
  other.values.resize(other.times_sec.size());
  CHECK_THROWS_AS(aggregate_subjects({series(v), other}), ParameterError);
}

TEST_CASE("stationary noise gives a flat course") {
  std::vector<SubjectSeries> subjects;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    subjects.push_back(signature_time_course(stationary_recording(70 * 250, 250.0, seed),
                                             regular_events(3.0, 3.0, 20), literature_signature_def()));
  const auto tc = aggregate_subjects(subjects);
  const double grand = std::accumulate(tc.mean.begin(), tc.mean.end(), 0.0) / 11.0;
  for (std::size_t i = 0; i < 11; ++i) {
    CAPTURE(i);
    CHECK(std::abs(tc.mean[i] - grand) <= 3.0 * tc.std_err[i]);
  }
}

TEST_CASE("ramped pre-event bursts peak near the event") {
  std::vector<SubjectSeries> subjects;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto config = dynamics_synth_config();
    config.seed = seed;
    const auto data = generate(config);
    std::vector<EventMarker> high;
    for (const auto& e : data.events)
      if (e.class_label == ClassLabel::high) high.push_back(e);
    subjects.push_back(signature_time_course(data.recording, high, literature_signature_def()));
  }
  const auto tc = aggregate_subjects(subjects);
  const auto peak = static_cast<std::size_t>(std::max_element(tc.mean.begin(), tc.mean.end()) - tc.mean.begin());
  CHECK(std::abs(tc.times_sec[peak]) <= 0.4 + 1e-9);
  CHECK(tc.mean[peak] > tc.mean.front());
  CHECK(tc.mean[peak] > tc.mean.back());
}

}  // TEST_SUITE

TEST_SUITE("synth") {

TEST_CASE("generation is deterministic in the seed") {
  auto config = default_synth_config();
  config.n_blocks = 2;
  const auto a = generate(config);
  const auto b = generate(config);
  CHECK(a.recording.data() == b.recording.data());
  CHECK(a.events.size() == b.events.size());
  CHECK(a.manifest.to_json() == b.manifest.to_json());
  config.seed = 2;
  CHECK_FALSE(generate(config).recording.data() == a.recording.data());
}

TEST_CASE("layout follows the configuration") {
  const auto config = default_synth_config();
  const auto d = generate(config);
  CHECK(d.events.size() == 2 * config.epochs_per_class_per_block * config.n_blocks);
  CHECK(d.recording.channel_labels() == canonical_channels());
  for (std::size_t b = 0; b < config.n_blocks; ++b) {
    std::size_t hi = 0, lo = 0;
    for (const auto& e : d.events)
      if (e.block_id == static_cast<int>(b)) (e.class_label == ClassLabel::high ? hi : lo)++;
    CHECK(hi == config.epochs_per_class_per_block);
    CHECK(lo == config.epochs_per_class_per_block);
  }
  CHECK(std::is_sorted(d.events.begin(), d.events.end(),
                       [](const EventMarker& x, const EventMarker& y) { return x.time_sec < y.time_sec; }));
  const auto epochs = extract_epochs(d.recording, d.events, {-1.0, 0.0});
  CHECK(epochs.size() == d.events.size());
  CHECK(d.manifest.epoch_samples == 250);

  auto bad = config;
  bad.effect_channels = {"Cz"};
  CHECK_THROWS_AS(generate(bad), ValidationError);
}

TEST_CASE("pink noise is normalized") {
  const auto x = pink_noise(20000, 250.0, 1.0, 9);
  const auto s = mean_se(x);
  CHECK(std::abs(s.mean) < 1e-9);
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  CHECK(std::sqrt(ss / static_cast<double>(x.size())) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pink_noise(1000, 250.0, 1.0, 3) == pink_noise(1000, 250.0, 1.0, 3));
}

TEST_CASE("theta bin power increase matches the manifest") {
  auto config = null_synth_config();
  config.theta_boost_uv = 6.0;
  config.seed = 4;
  const auto d = generate(config);
  const auto epochs = extract_epochs(d.recording, d.events, {-1.0, 0.0});
  const auto fz = d.recording.channel_index("Fz");
  std::vector<double> linear;
  for (const auto& e : epochs) linear.push_back(std::pow(10.0, band_power(e, theta_band()).log10_power[fz]));
  const auto diff = class_difference(epochs, linear);
  CAPTURE(diff.mean);
  CAPTURE(diff.se);
  CHECK(std::abs(diff.mean - d.manifest.theta_bin_power_increase) <= 3.0 * diff.se);
  CHECK(d.manifest.theta_bin_power_increase == 250.0 * 250.0 * 36.0 / 4.0);
}

TEST_CASE("channels without planted effects do not separate") {
  const auto s = synth_features(default_synth_config());
  for (const std::string ch : {"Pz", "CPz", "POz"})
    for (const std::string band : {"delta", "theta", "alpha"}) {
      const auto diff = class_difference(s.epochs, column(s.features, "bp_" + band + "_" + ch));
      CAPTURE(ch);
      CAPTURE(band);
      CHECK(std::abs(diff.mean) <= 3.0 * diff.se);
    }
}

TEST_CASE("manifest lists the planted effects") {
  auto config = default_synth_config();
  const auto m = generate(config).manifest;
  const auto names = m.feature_list();
  auto has = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
  CHECK(has("bp_theta_Fz"));
  CHECK(has("bp_delta_AFz"));
  CHECK_FALSE(has("bp_alpha_Fz"));
  CHECK_FALSE(has("bp_theta_Pz"));
  CHECK(has("coh_alpha_F3_F4"));
  CHECK(has("mi_F3_F4"));
  CHECK(has("mi_Fz_Pz"));
  CHECK_FALSE(has("mi_Pz_CPz"));
  CHECK_FALSE(has("coh_theta_F3_Pz"));
  const auto order = feature_names(canonical_channels());
  std::size_t last = 0;
  for (const auto& n : names) {
    const auto at = static_cast<std::size_t>(std::find(order.begin(), order.end(), n) - order.begin());
    CHECK(at >= last);
    last = at;
  }
  CHECK(m.to_json().find("\"direction\": \"+-\"") != std::string::npos);

  config.theta_boost_uv = 0.0;
  config.delta_boost_uv = 0.0;
  const auto source_only = generate(config).manifest;
  // 6 frontal pairs, each with MI and three coherence bands
  CHECK(source_only.discriminative_features.size() == 24);
  for (const auto& f : source_only.discriminative_features) CHECK(f.direction == EffectDirection::up);
}

TEST_CASE("manifest effects move in the stated direction") {
  auto config = default_synth_config();
  config.theta_boost_uv = 8.0;
  config.delta_boost_uv = 8.0;
  const auto s = synth_features(config);
  for (const auto& f : s.data.manifest.discriminative_features) {
    const auto diff = class_difference(s.epochs, column(s.features, f.feature));
    CAPTURE(f.feature);
    if (f.direction == EffectDirection::up) CHECK(diff.mean > 3.0 * diff.se);
  }
}

TEST_CASE("coherence grows with the shared-source gain") {
  double last = -1.0;
  for (double g : {0.0, 0.5, 1.0}) {
    auto config = null_synth_config();
    config.n_blocks = 2;
    config.shared_source_gain = g;
    const auto s = synth_features(config);
    std::vector<double> hi;
    for (std::size_t i = 0; i < s.epochs.size(); ++i)
      if (s.epochs[i].class_label == ClassLabel::high) hi.push_back(s.features[i].at("coh_alpha_F3_F4"));
    const double m = mean_se(hi).mean;
    CAPTURE(g);
    CHECK(m > last);
    last = m;
  }
}

TEST_CASE("the null preset classifies at chance") {
  auto config = null_synth_config();
  config.n_blocks = 6;
  config.epochs_per_class_per_block = 24;
  const auto s = synth_features(config);
  CHECK(s.data.manifest.discriminative_features.empty());
  const auto set = make_feature_table(s.features, s.epochs).to_labeled_set();
  const auto r = evaluate(set, Splitter{}, 1, FeatureSpace::all);
  CHECK(r.mean > 0.4);
  CHECK(r.mean < 0.6);
}

TEST_CASE("signature selection recovers the planted features") {
  auto config = null_synth_config();
  config.n_blocks = 6;
  config.epochs_per_class_per_block = 24;
  config.effect_channels = {"F3", "F4"};
  config.theta_boost_uv = 20.0;
  const auto s = synth_features(config);
  const auto planted = s.data.manifest.feature_list();
  // 2 BP, MI and three coherence bands of the pair, 12 other MI terms touching F3 or F4
  REQUIRE(planted.size() == 18);
  const auto set = make_feature_table(s.features, s.epochs).to_labeled_set();
  const auto scores = anova_f_scores(set.x, set.y, set.feature_names);
  for (std::size_t k : {std::size_t{5}, planted.size()}) {
    const auto def = build_signature(set.x, set.y, set.feature_names, scores, k);
    std::vector<std::string> picked;
    for (const auto& e : def.entries) picked.push_back(e.feature_name);
    std::sort(picked.begin(), picked.end());
    auto expected = planted;
    std::sort(expected.begin(), expected.end());
    CAPTURE(k);
    if (k == planted.size()) {
      CHECK(picked == expected);
    } else {
      CHECK(std::includes(expected.begin(), expected.end(), picked.begin(), picked.end()));
    }
  }
}

TEST_CASE("planted theta raises the literature signature") {
  auto config = null_synth_config();
  config.n_blocks = 6;
  config.epochs_per_class_per_block = 24;
  config.theta_boost_uv = 5.0;
  const auto s = synth_features(config);
  std::vector<double> lit;
  for (const auto& f : s.features) lit.push_back(literature_signature(f));
  const auto diff = class_difference(s.epochs, lit);
  CHECK(diff.mean > 3.0 * diff.se);
}

}  // TEST_SUITE
