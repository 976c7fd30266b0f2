#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ewb/coherence.hpp"
#include "ewb/signal.hpp"

namespace ewb {

enum class FeatureKind { bp, mi, coh };

// Canonical names: "bp_<band>_<ch>", "mi_<chA>_<chB>" (A at or before B in
// channel order), "coh_<band>_<chA>_<chB>" (A strictly before B).
struct FeatureName {
  FeatureKind kind = FeatureKind::bp;
  std::string band;     // empty for MI
  std::string channel_a;
  std::string channel_b;  // empty for BP

  std::string str() const;
  // Parses a canonical name. Channel labels must not contain '_'.
  static FeatureName parse(const std::string& name);
};

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  std::size_t floored_band_powers = 0;  // channels whose in-band energy hit the log floor
  std::size_t degenerate_mi = 0;        // MI evaluations on a constant power series

  // Value by canonical name; throws LookupError.
  double at(const std::string& name) const;
};

constexpr double kPowerFloor = 1e-20;

struct BandPower {
  std::vector<double> log10_power;  // one per channel
  std::vector<bool> floored;
};

// Per channel, log10 of the sum of |DFT|^2 over one-sided bins k with
// k * rate / N in [low, high), DFT over the whole epoch without tapering.
BandPower band_power(const Epoch& epoch, const BandSpec& band);

using WindowFeatureFn = std::function<std::vector<double>(const Epoch&)>;

// Applies fn to floor(duration / window_sec) consecutive non-overlapping
// windows and averages element-wise; a shorter trailing remainder is dropped.
std::vector<double> windowed_average(const Epoch& epoch, double window_sec, const WindowFeatureFn& fn);

struct FeatureOptions {
  std::vector<BandSpec> bands = canonical_bands();
  std::size_t mi_bins = 64;
  WelchParams welch{};
  double window_sec = 1.0;  // epochs longer than this average MI and COH over windows
};

// 21 BP, then 28 MI, then 63 COH names for a 7-channel subset.
std::vector<std::string> feature_names(const std::vector<std::string>& channels,
                                       const std::vector<BandSpec>& bands = canonical_bands());

// Full 112-entry vector for a 7-channel epoch, names from its channel labels.
FeatureVector extract_all(const Epoch& epoch, const FeatureOptions& options = {});

// extract_all over many epochs; runs in parallel, results in input order.
std::vector<FeatureVector> extract_all(const std::vector<Epoch>& epochs, const FeatureOptions& options = {});

}  // namespace ewb
