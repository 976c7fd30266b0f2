#include "ewb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <json.hpp>

#include "ewb/errors.hpp"
#include "ewb/features.hpp"
#include "ewb/fft.hpp"
#include "ewb/random.hpp"

namespace ewb {
namespace {

constexpr double kThetaHz = 6.0;
constexpr double kDeltaHz = 2.0;
constexpr double kSpectralKneeHz = 0.5;

std::size_t next_smooth(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2u, 3u, 5u})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

std::string envelope_name(BurstEnvelope e) { return e == BurstEnvelope::flat ? "flat" : "ramp"; }

std::vector<PlantedFeature> planted_features(const SynthConfig& config) {
  const auto& fx = config.effect_channels;
  auto planted = [&](const std::string& ch) { return std::find(fx.begin(), fx.end(), ch) != fx.end(); };
  const bool tones = config.theta_boost_uv > 0.0 || config.delta_boost_uv > 0.0;
  const bool coupled = config.shared_source_gain > 0.0 || (tones && fx.size() >= 2);

  std::map<std::string, EffectDirection> marked;
  for (const auto& ch : fx) {
    if (config.delta_boost_uv > 0.0) marked["bp_delta_" + ch] = EffectDirection::up;
    if (config.theta_boost_uv > 0.0) marked["bp_theta_" + ch] = EffectDirection::up;
  }
  const auto& chs = config.channels;
  for (std::size_t i = 0; i < chs.size(); ++i)
    for (std::size_t j = i; j < chs.size(); ++j) {
      const bool a = planted(chs[i]);
      const bool b = planted(chs[j]);
      const std::string mi = "mi_" + chs[i] + "_" + chs[j];
      if (i != j && a && b && coupled) {
        marked[mi] = EffectDirection::up;
        for (const char* band : {"delta", "theta", "alpha"})
          marked[std::string("coh_") + band + "_" + chs[i] + "_" + chs[j]] = EffectDirection::up;
      } else if (tones && (a || b)) {
        marked[mi] = EffectDirection::either;
      }
    }

  std::vector<PlantedFeature> out;
  for (const auto& name : feature_names(chs))
    if (auto it = marked.find(name); it != marked.end()) out.push_back({name, it->second});
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad.emplace_back(key);
  };
  require(!channels.empty(), "channels");
  require(sampling_rate_hz > 0.0, "sampling_rate_hz");
  require(epochs_per_class_per_block > 0, "epochs_per_class_per_block");
  require(n_blocks > 0, "n_blocks");
  require(epoch_sec > 0.0, "epoch_sec");
  require(event_spacing_sec >= epoch_sec, "event_spacing_sec");
  require(lead_sec >= 0.0, "lead_sec");
  require(block_gap_sec >= 0.0, "block_gap_sec");
  require(noise_std_uv > 0.0, "noise_std_uv");
  require(noise_slope >= 0.0, "noise_slope");
  require(theta_boost_uv >= 0.0, "theta_boost_uv");
  require(delta_boost_uv >= 0.0, "delta_boost_uv");
  require(shared_source_gain >= 0.0, "shared_source_gain");
  for (const auto& c : effect_channels)
    if (std::find(channels.begin(), channels.end(), c) == channels.end()) {
      bad.emplace_back("effect_channels");
      break;
    }
  if (!bad.empty()) {
    std::string list;
    for (const auto& k : bad) list += (list.empty() ? "" : ", ") + k;
    throw ValidationError(bad, "synth config: invalid value(s) for " + list);
  }
}

SynthConfig default_synth_config() {
  SynthConfig c;
  c.theta_boost_uv = 2.5;
  c.delta_boost_uv = 2.5;
  c.shared_source_gain = 0.8;
  return c;
}

SynthConfig broad_synth_config() {
  SynthConfig c = default_synth_config();
  c.effect_channels = c.channels;
  c.theta_boost_uv = 1.5;
  c.delta_boost_uv = 1.5;
  c.shared_source_gain = 0.5;
  return c;
}

SynthConfig null_synth_config() {
  SynthConfig c = default_synth_config();
  c.theta_boost_uv = 0.0;
  c.delta_boost_uv = 0.0;
  c.shared_source_gain = 0.0;
  return c;
}

SynthConfig dynamics_synth_config() {
  SynthConfig c = default_synth_config();
  c.envelope = BurstEnvelope::ramp;
  c.theta_boost_uv = 8.0;
  c.delta_boost_uv = 8.0;
  c.event_spacing_sec = 4.0;
  c.epochs_per_class_per_block = 10;
  c.n_blocks = 2;
  return c;
}

std::vector<double> pink_noise(std::size_t n, double rate, double slope, std::uint64_t seed) {
  const std::size_t m = next_smooth(n);
  Rng rng(seed);
  std::vector<cplx> white(m);
  for (auto& v : white) v = {rng.normal(), 0.0};
  auto spec = fft(std::span<const cplx>(white));
  spec[0] = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const std::size_t kk = std::min(k, m - k);
    const double f = std::max(static_cast<double>(kk) * rate / static_cast<double>(m), kSpectralKneeHz);
    spec[k] *= std::pow(f, -slope / 2.0);
  }
  const auto shaped = ifft(spec);
  std::vector<double> out(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = shaped[i].real();
    mean += out[i];
  }
  mean /= static_cast<double>(std::max<std::size_t>(n, 1));
  double var = 0.0;
  for (double& v : out) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(std::max<std::size_t>(n, 1)));
  if (sd > 0.0)
    for (double& v : out) v /= sd;
  return out;
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const double rate = config.sampling_rate_hz;
  const std::size_t per_block = 2 * config.epochs_per_class_per_block;
  const double block_sec = static_cast<double>(per_block) * config.event_spacing_sec;
  const double total_sec = 2.0 * config.lead_sec + static_cast<double>(config.n_blocks) * block_sec +
                           static_cast<double>(config.n_blocks - 1) * config.block_gap_sec;
  const auto n_samples = static_cast<std::size_t>(std::ceil(total_sec * rate)) + 1;
  const auto epoch_n = static_cast<std::size_t>(std::llround(config.epoch_sec * rate));

  Rng rng(config.seed);
  const std::size_t n_ch = config.channels.size();
  Matrix data(n_ch, n_samples);
  for (std::size_t c = 0; c < n_ch; ++c) {
    const auto noise = pink_noise(n_samples, rate, config.noise_slope, rng.next_u64());
    for (std::size_t t = 0; t < n_samples; ++t) data(c, t) = config.noise_std_uv * noise[t];
  }
  const auto shared = pink_noise(n_samples, rate, config.noise_slope, rng.next_u64());

  std::vector<std::size_t> effect_rows;
  for (const auto& label : config.effect_channels)
    effect_rows.push_back(static_cast<std::size_t>(
        std::find(config.channels.begin(), config.channels.end(), label) - config.channels.begin()));

  std::vector<EventMarker> events;
  for (std::size_t b = 0; b < config.n_blocks; ++b) {
    std::vector<int> classes(per_block);
    for (std::size_t i = 0; i < per_block; ++i) classes[i] = i < config.epochs_per_class_per_block ? 0 : 1;
    shuffle(std::span<int>(classes), rng);
    const double block_start = config.lead_sec + static_cast<double>(b) * (block_sec + config.block_gap_sec);
    for (std::size_t j = 0; j < per_block; ++j) {
      const double window_start = block_start + static_cast<double>(j) * config.event_spacing_sec;
      EventMarker ev;
      ev.time_sec = window_start + config.epoch_sec;
      ev.class_label = classes[j] == 1 ? ClassLabel::high : ClassLabel::low;
      ev.block_id = static_cast<int>(b);
      events.push_back(ev);

      if (ev.class_label != ClassLabel::high) continue;
      const auto first = static_cast<std::size_t>(std::llround(window_start * rate));
      const double g = config.shared_source_gain;
      for (std::size_t row : effect_rows) {
        const double theta_phase = 2.0 * std::numbers::pi * rng.uniform();
        const double delta_phase = 2.0 * std::numbers::pi * rng.uniform();
        for (std::size_t t = 0; t < epoch_n && first + t < n_samples; ++t) {
          const double tau = static_cast<double>(t) / rate;
          const double env = config.envelope == BurstEnvelope::flat ? 1.0 : static_cast<double>(t + 1) / static_cast<double>(epoch_n);
          double& v = data(row, first + t);
          const double gain = g * env;
          v = (v + gain * config.noise_std_uv * shared[first + t]) / std::sqrt(1.0 + gain * gain);
          v += env * (config.theta_boost_uv * std::sin(2.0 * std::numbers::pi * kThetaHz * tau + theta_phase) +
                      config.delta_boost_uv * std::sin(2.0 * std::numbers::pi * kDeltaHz * tau + delta_phase));
        }
      }
    }
  }

  SynthManifest manifest;
  manifest.config = config;
  manifest.epoch_samples = epoch_n;
  const double n = static_cast<double>(epoch_n);
  manifest.theta_bin_power_increase = n * n * config.theta_boost_uv * config.theta_boost_uv / 4.0;
  manifest.delta_bin_power_increase = n * n * config.delta_boost_uv * config.delta_boost_uv / 4.0;
  manifest.discriminative_features = planted_features(config);

  return {Recording(config.channels, rate, std::move(data)), std::move(events), std::move(manifest)};
}

std::vector<std::string> SynthManifest::feature_list() const {
  std::vector<std::string> names;
  for (const auto& f : discriminative_features) names.push_back(f.feature);
  return names;
}

std::string SynthManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "ewb-synth-manifest";
  j["version"] = 1;
  j["seed"] = config.seed;
  j["sampling_rate_hz"] = config.sampling_rate_hz;
  j["n_blocks"] = config.n_blocks;
  j["epochs_per_class_per_block"] = config.epochs_per_class_per_block;
  j["epoch_samples"] = epoch_samples;
  j["effect_channels"] = config.effect_channels;
  j["theta_boost_uv"] = config.theta_boost_uv;
  j["delta_boost_uv"] = config.delta_boost_uv;
  j["shared_source_gain"] = config.shared_source_gain;
  j["envelope"] = envelope_name(config.envelope);
  j["expected_theta_bin_power_increase"] = theta_bin_power_increase;
  j["expected_delta_bin_power_increase"] = delta_bin_power_increase;
  nlohmann::ordered_json effects = nlohmann::ordered_json::array();
  for (const auto& f : discriminative_features)
    effects.push_back({{"feature", f.feature}, {"direction", f.direction == EffectDirection::up ? "+" : "+-"}});
  j["discriminative_features"] = std::move(effects);
  return j.dump(2) + "\n";
}

}  // namespace ewb
