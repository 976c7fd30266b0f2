#include "ewb/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "ewb/errors.hpp"
#include "ewb/formats.hpp"

namespace ewb {
namespace {

using json = nlohmann::ordered_json;

// Reads fields out of one JSON object, tracking which keys were consumed so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix, std::vector<std::string>& unknown, std::vector<std::string>& bad)
      : j_(j), prefix_(std::move(prefix)), unknown_(unknown), bad_(bad) {
    if (!j_.is_object()) bad_.push_back(prefix_.empty() ? "<root>" : prefix_);
  }
  ~ObjectReader() {
    if (!j_.is_object()) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) unknown_.push_back(path(key));
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = get(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) throw std::invalid_argument("not a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v->is_number_integer()) throw std::invalid_argument("not an integer");
        if (v->is_number_integer() && !v->is_number_unsigned() && v->template get<long long>() < 0)
          throw std::invalid_argument("negative");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("not a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("not a string");
      }
      out = v->template get<T>();
    } catch (const std::exception&) {
      bad_.push_back(path(key));
    }
  }

  template <class T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    const json* v = get(key);
    if (!v) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    T tmp{};
    seen_.erase(key);
    read(key, tmp);
    out = tmp;
  }

  void read_strings(const std::string& key, std::vector<std::string>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array()) {
      bad_.push_back(path(key));
      return;
    }
    std::vector<std::string> tmp;
    for (const auto& e : *v) {
      if (!e.is_string()) {
        bad_.push_back(path(key));
        return;
      }
      tmp.push_back(e.get<std::string>());
    }
    out = std::move(tmp);
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& unknown_;
  std::vector<std::string>& bad_;
  std::set<std::string> seen_;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::string envelope_text(BurstEnvelope e) { return e == BurstEnvelope::flat ? "flat" : "ramp"; }

std::string join(const std::vector<std::string>& keys) {
  std::string s;
  for (std::size_t i = 0; i < keys.size(); ++i) s += (i ? ", " : "") + keys[i];
  return s;
}

}  // namespace

void PipelineConfig::validate() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& key) {
    if (!ok) bad.push_back(key);
  };

  check(channels.size() == 7, "channels");  // feature extraction works on a 7-channel subset
  for (const auto& ch : channels) check(!ch.empty() && ch.find('_') == std::string::npos && ch.find(',') == std::string::npos, "channels");
  check(std::set<std::string>(channels.begin(), channels.end()).size() == channels.size(), "channels");

  check(!features.bands.empty(), "features.bands");
  for (const auto& b : features.bands)
    check(!b.name.empty() && b.name.find('_') == std::string::npos && b.low_hz > 0.0 && b.high_hz > b.low_hz,
          "features.bands");
  check(features.mi_bins >= 2, "features.mi_bins");
  check(features.welch.segment_sec > 0.0, "features.welch.segment_sec");
  check(features.welch.overlap >= 0.0 && features.welch.overlap < 1.0, "features.welch.overlap");
  check(features.welch.resolution_hz > 0.0, "features.welch.resolution_hz");
  check(features.window_sec > 0.0, "features.window_sec");

  check(preprocess.bandpass_low_hz > 0.0 && preprocess.bandpass_high_hz > preprocess.bandpass_low_hz,
        "preprocess.bandpass_low_hz");
  if (preprocess.target_rate_hz) {
    check(*preprocess.target_rate_hz > 0.0, "preprocess.target_rate_hz");
    // The pass band must survive the anti-alias filter of the downsampler.
    check(preprocess.bandpass_high_hz < 0.4 * *preprocess.target_rate_hz, "preprocess.bandpass_high_hz");
    for (const auto& b : features.bands) check(b.high_hz <= 0.5 * *preprocess.target_rate_hz, "features.bands");
  }
  if (preprocess.reference)
    for (const auto& ch : channels) check(ch != *preprocess.reference, "preprocess.reference");

  check(epoch.end_sec > epoch.start_sec, "epoch.end_sec");

  check(!evaluation.ng_sweep.empty(), "evaluation.ng_sweep");
  for (auto g : evaluation.ng_sweep) check(g >= 1, "evaluation.ng_sweep");
  check(evaluation.svm.c > 0.0, "evaluation.svm.c");
  check(evaluation.svm.tolerance > 0.0, "evaluation.svm.tolerance");
  check(evaluation.svm.max_iterations >= 1, "evaluation.svm.max_iterations");
  check(evaluation.k >= 2, "evaluation.k");
  check(evaluation.repeats >= 1, "evaluation.repeats");
  if (evaluation.top_percent)
    check(*evaluation.top_percent > 0.0 && *evaluation.top_percent <= 100.0, "evaluation.top_percent");

  check(statistics.resamples >= 1, "statistics.resamples");
  check(statistics.signature_k >= 1, "statistics.signature_k");

  check(dynamics.window_sec > 0.0, "dynamics.window_sec");
  check(dynamics.step_sec > 0.0, "dynamics.step_sec");
  check(dynamics.t_max >= dynamics.t_min, "dynamics.t_max");

  try {
    synth.validate();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back("synth." + k);
  }

  if (!bad.empty()) {
    std::vector<std::string> unique;
    for (const auto& k : bad)
      if (std::find(unique.begin(), unique.end(), k) == unique.end()) unique.push_back(k);
    throw ValidationError(unique, "invalid configuration: " + join(unique));
  }
}

std::string PipelineConfig::to_json() const {
  json j;
  j["format"] = "ewb-config";
  j["version"] = 1;
  j["channels"] = channels;

  json bands = json::array();
  for (const auto& b : features.bands) bands.push_back({{"name", b.name}, {"low_hz", b.low_hz}, {"high_hz", b.high_hz}});
  j["features"] = {{"bands", bands},
                   {"mi_bins", features.mi_bins},
                   {"welch", {{"segment_sec", features.welch.segment_sec},
                              {"overlap", features.welch.overlap},
                              {"resolution_hz", features.welch.resolution_hz}}},
                   {"window_sec", features.window_sec}};

  j["preprocess"] = {{"bandpass_low_hz", preprocess.bandpass_low_hz},
                     {"bandpass_high_hz", preprocess.bandpass_high_hz},
                     {"reference", optional_json(preprocess.reference)},
                     {"target_rate_hz", optional_json(preprocess.target_rate_hz)}};
  j["epoch"] = {{"start_sec", epoch.start_sec}, {"end_sec", epoch.end_sec}};

  json svm = {{"c", evaluation.svm.c},
              {"gamma", evaluation.svm.gamma > 0.0 ? json(evaluation.svm.gamma) : json("scale")},
              {"tolerance", evaluation.svm.tolerance},
              {"max_iterations", evaluation.svm.max_iterations}};
  j["evaluation"] = {{"ng_sweep", evaluation.ng_sweep},
                     {"svm", svm},
                     {"cv", to_string(evaluation.cv)},
                     {"k", evaluation.k},
                     {"repeats", evaluation.repeats},
                     {"seed", evaluation.seed},
                     {"top_percent", optional_json(evaluation.top_percent)}};
  j["statistics"] = {{"resamples", statistics.resamples},
                     {"seed", statistics.seed},
                     {"signature_k", statistics.signature_k}};
  j["dynamics"] = {{"window_sec", dynamics.window_sec},
                   {"step_sec", dynamics.step_sec},
                   {"t_min", dynamics.t_min},
                   {"t_max", dynamics.t_max}};
  j["synth"] = {{"channels", synth.channels},
                {"effect_channels", synth.effect_channels},
                {"sampling_rate_hz", synth.sampling_rate_hz},
                {"epochs_per_class_per_block", synth.epochs_per_class_per_block},
                {"n_blocks", synth.n_blocks},
                {"epoch_sec", synth.epoch_sec},
                {"event_spacing_sec", synth.event_spacing_sec},
                {"lead_sec", synth.lead_sec},
                {"block_gap_sec", synth.block_gap_sec},
                {"noise_std_uv", synth.noise_std_uv},
                {"noise_slope", synth.noise_slope},
                {"theta_boost_uv", synth.theta_boost_uv},
                {"delta_boost_uv", synth.delta_boost_uv},
                {"shared_source_gain", synth.shared_source_gain},
                {"envelope", envelope_text(synth.envelope)},
                {"seed", synth.seed}};
  j["paths"] = {{"in", optional_json(paths.in)}, {"out", optional_json(paths.out)}};
  return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError({"<root>"}, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  std::vector<std::string> unknown, bad;
  {
    ObjectReader root(j, "", unknown, bad);
    if (const json* f = root.get("format"); f && *f != "ewb-config") bad.push_back("format");
    if (const json* v = root.get("version"); v && *v != 1) bad.push_back("version");
    root.read_strings("channels", c.channels);

    if (const json* fj = root.get("features")) {
      ObjectReader r(*fj, "features", unknown, bad);
      if (const json* bj = r.get("bands")) {
        if (!bj->is_array()) {
          bad.push_back("features.bands");
        } else {
          std::vector<BandSpec> bands;
          for (std::size_t i = 0; i < bj->size(); ++i) {
            ObjectReader br((*bj)[i], "features.bands[" + std::to_string(i) + "]", unknown, bad);
            BandSpec b;
            br.read("name", b.name);
            br.read("low_hz", b.low_hz);
            br.read("high_hz", b.high_hz);
            bands.push_back(b);
          }
          c.features.bands = std::move(bands);
        }
      }
      r.read("mi_bins", c.features.mi_bins);
      if (const json* wj = r.get("welch")) {
        ObjectReader wr(*wj, "features.welch", unknown, bad);
        wr.read("segment_sec", c.features.welch.segment_sec);
        wr.read("overlap", c.features.welch.overlap);
        wr.read("resolution_hz", c.features.welch.resolution_hz);
      }
      r.read("window_sec", c.features.window_sec);
    }

    if (const json* pj = root.get("preprocess")) {
      ObjectReader r(*pj, "preprocess", unknown, bad);
      r.read("bandpass_low_hz", c.preprocess.bandpass_low_hz);
      r.read("bandpass_high_hz", c.preprocess.bandpass_high_hz);
      r.read_optional("reference", c.preprocess.reference);
      r.read_optional("target_rate_hz", c.preprocess.target_rate_hz);
    }
    if (const json* ej = root.get("epoch")) {
      ObjectReader r(*ej, "epoch", unknown, bad);
      r.read("start_sec", c.epoch.start_sec);
      r.read("end_sec", c.epoch.end_sec);
    }
    if (const json* ej = root.get("evaluation")) {
      ObjectReader r(*ej, "evaluation", unknown, bad);
      r.read("ng_sweep", c.evaluation.ng_sweep);
      if (const json* sj = r.get("svm")) {
        ObjectReader sr(*sj, "evaluation.svm", unknown, bad);
        sr.read("c", c.evaluation.svm.c);
        if (const json* g = sr.get("gamma")) {
          if (g->is_string() && *g == "scale")
            c.evaluation.svm.gamma = 0.0;
          else if (g->is_number() && g->get<double>() > 0.0)
            c.evaluation.svm.gamma = g->get<double>();
          else
            bad.push_back("evaluation.svm.gamma");
        }
        sr.read("tolerance", c.evaluation.svm.tolerance);
        sr.read("max_iterations", c.evaluation.svm.max_iterations);
      }
      std::string cv = to_string(c.evaluation.cv);
      r.read("cv", cv);
      try {
        c.evaluation.cv = parse_cv_scheme(cv);
      } catch (const Error&) {
        bad.push_back("evaluation.cv");
      }
      r.read("k", c.evaluation.k);
      r.read("repeats", c.evaluation.repeats);
      r.read("seed", c.evaluation.seed);
      r.read_optional("top_percent", c.evaluation.top_percent);
    }
    if (const json* sj = root.get("statistics")) {
      ObjectReader r(*sj, "statistics", unknown, bad);
      r.read("resamples", c.statistics.resamples);
      r.read("seed", c.statistics.seed);
      r.read("signature_k", c.statistics.signature_k);
    }
    if (const json* dj = root.get("dynamics")) {
      ObjectReader r(*dj, "dynamics", unknown, bad);
      r.read("window_sec", c.dynamics.window_sec);
      r.read("step_sec", c.dynamics.step_sec);
      r.read("t_min", c.dynamics.t_min);
      r.read("t_max", c.dynamics.t_max);
    }
    if (const json* sj = root.get("synth")) {
      ObjectReader r(*sj, "synth", unknown, bad);
      auto& s = c.synth;
      r.read_strings("channels", s.channels);
      r.read_strings("effect_channels", s.effect_channels);
      r.read("sampling_rate_hz", s.sampling_rate_hz);
      r.read("epochs_per_class_per_block", s.epochs_per_class_per_block);
      r.read("n_blocks", s.n_blocks);
      r.read("epoch_sec", s.epoch_sec);
      r.read("event_spacing_sec", s.event_spacing_sec);
      r.read("lead_sec", s.lead_sec);
      r.read("block_gap_sec", s.block_gap_sec);
      r.read("noise_std_uv", s.noise_std_uv);
      r.read("noise_slope", s.noise_slope);
      r.read("theta_boost_uv", s.theta_boost_uv);
      r.read("delta_boost_uv", s.delta_boost_uv);
      r.read("shared_source_gain", s.shared_source_gain);
      std::string env = envelope_text(s.envelope);
      r.read("envelope", env);
      if (env == "flat")
        s.envelope = BurstEnvelope::flat;
      else if (env == "ramp")
        s.envelope = BurstEnvelope::ramp;
      else
        bad.push_back("synth.envelope");
      r.read("seed", s.seed);
    }
    if (const json* pj = root.get("paths")) {
      ObjectReader r(*pj, "paths", unknown, bad);
      r.read_optional("in", c.paths.in);
      r.read_optional("out", c.paths.out);
    }
  }
  if (!unknown.empty()) throw ValidationError(unknown, "unknown configuration keys: " + join(unknown));
  if (!bad.empty()) throw ValidationError(bad, "malformed configuration values: " + join(bad));
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) { return from_json(read_text(path)); }

Splitter PipelineConfig::splitter() const {
  Splitter s;
  s.scheme = evaluation.cv;
  s.k = evaluation.k;
  s.repeats = evaluation.repeats;
  s.seed = evaluation.seed;
  return s;
}

TimeCourseOptions PipelineConfig::time_course_options() const {
  TimeCourseOptions o = dynamics;
  o.channels = channels;
  o.features = features;
  return o;
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) { return a.to_json() == b.to_json(); }

}  // namespace ewb
