#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewb/signal.hpp"

namespace ewb {

enum class BurstEnvelope {
  flat,  // constant amplitude across the HIGH epoch
  ramp,  // rises linearly from 0 at the epoch start to full amplitude at the event
};

struct SynthConfig {
  std::vector<std::string> channels = canonical_channels();
  std::vector<std::string> effect_channels{"F3", "F4", "Fz", "AFz"};
  double sampling_rate_hz = 250.0;
  std::size_t epochs_per_class_per_block = 24;
  std::size_t n_blocks = 6;
  double epoch_sec = 1.0;
  // Time between consecutive events of a block; equal to epoch_sec the
  // epochs tile the block with no gaps.
  double event_spacing_sec = 1.0;
  double lead_sec = 2.0;       // quiet data before the first and after the last block
  double block_gap_sec = 2.0;
  double noise_std_uv = 10.0;
  double noise_slope = 1.0;    // background power spectrum ~ 1 / f^slope
  double theta_boost_uv = 0.0;  // 6 Hz amplitude added to HIGH epochs on effect channels
  double delta_boost_uv = 0.0;  // 2 Hz amplitude
  // Mixing weight of one latent source shared by the effect channels during
  // HIGH epochs; the mix is variance preserving, (noise + g s) / sqrt(1 + g^2).
  double shared_source_gain = 0.0;
  BurstEnvelope envelope = BurstEnvelope::flat;
  std::uint64_t seed = 1;

  // Throws ValidationError listing offending fields.
  void validate() const;
};

// Default planted-effect configuration used by the acceptance suite and the
// `synth` subcommand.
SynthConfig default_synth_config();
// Same layout with every planted effect set to zero.
SynthConfig null_synth_config();

// Weaker effects planted on every channel, so class information is spread
// over most of the 112 features rather than concentrated frontally.
SynthConfig broad_synth_config();

// Planted bursts that ramp up towards each event, with events far enough
// apart that a +-1 s window around any event never reaches a neighbour.
SynthConfig dynamics_synth_config();

enum class EffectDirection {
  up,      // higher in HIGH epochs by construction
  either,  // moved by the plant, sign set by the histogram estimator (MI of a channel whose power distribution changed)
};

struct PlantedFeature {
  std::string feature;
  EffectDirection direction = EffectDirection::up;
};

struct SynthManifest {
  // Features whose class-conditional distribution differs by construction,
  // in canonical feature order. Sinusoids on two or more channels couple
  // them, so their pair MI and coherence (all bands: the short Welch
  // segments smear 6 Hz across delta to alpha) count as well.
  std::vector<PlantedFeature> discriminative_features;
  double theta_bin_power_increase = 0.0;              // N^2 A^2 / 4 at the 6 Hz bin, flat envelope
  double delta_bin_power_increase = 0.0;
  std::size_t epoch_samples = 0;
  SynthConfig config;

  std::vector<std::string> feature_list() const;
  std::string to_json() const;
};

struct SynthDataset {
  Recording recording;
  std::vector<EventMarker> events;  // in time order
  SynthManifest manifest;
};

SynthDataset generate(const SynthConfig& config);

// Background: white Gaussian noise shaped to a 1 / max(f, 0.5 Hz)^slope power
// spectrum, scaled to unit sample standard deviation.
std::vector<double> pink_noise(std::size_t n, double sampling_rate_hz, double slope, std::uint64_t seed);

}  // namespace ewb
