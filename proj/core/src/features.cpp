#include "ewb/features.hpp"

#include <cmath>

#include "ewb/errors.hpp"
#include "ewb/fft.hpp"
#include "ewb/mutual_information.hpp"
#include "ewb/parallel.hpp"

namespace ewb {
namespace {

constexpr std::size_t kSubsetChannels = 7;

std::vector<double> mi_block(const Epoch& epoch, std::size_t bins, std::size_t& degenerate) {
  std::vector<double> out;
  const std::size_t n = epoch.n_channels();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto mi = mutual_information(epoch.data.row(i), epoch.data.row(j), bins);
      if (mi.degenerate) ++degenerate;
      out.push_back(mi.nats);
    }
  return out;
}

Epoch window_of(const Epoch& epoch, std::size_t first, std::size_t length) {
  Epoch w;
  w.channel_labels = epoch.channel_labels;
  w.sampling_rate_hz = epoch.sampling_rate_hz;
  w.class_label = epoch.class_label;
  w.block_id = epoch.block_id;
  w.onset_sec = epoch.onset_sec + static_cast<double>(first) / epoch.sampling_rate_hz;
  w.data = Matrix(epoch.n_channels(), length);
  for (std::size_t r = 0; r < epoch.n_channels(); ++r) {
    auto src = epoch.data.row(r).subspan(first, length);
    std::copy(src.begin(), src.end(), w.data.row(r).begin());
  }
  return w;
}

std::size_t window_samples(const Epoch& epoch, double window_sec) {
  if (!(window_sec > 0.0)) throw ParameterError("windowed_average: window must be positive");
  return static_cast<std::size_t>(std::llround(window_sec * epoch.sampling_rate_hz));
}

}  // namespace

std::string FeatureName::str() const {
  switch (kind) {
    case FeatureKind::bp: return "bp_" + band + "_" + channel_a;
    case FeatureKind::mi: return "mi_" + channel_a + "_" + channel_b;
    case FeatureKind::coh: return "coh_" + band + "_" + channel_a + "_" + channel_b;
  }
  return {};
}

FeatureName FeatureName::parse(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = name.find('_', start);
    parts.push_back(name.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  FeatureName f;
  if (parts.size() == 3 && parts[0] == "bp") {
    f.kind = FeatureKind::bp;
    f.band = parts[1];
    f.channel_a = parts[2];
  } else if (parts.size() == 3 && parts[0] == "mi") {
    f.kind = FeatureKind::mi;
    f.channel_a = parts[1];
    f.channel_b = parts[2];
  } else if (parts.size() == 4 && parts[0] == "coh") {
    f.kind = FeatureKind::coh;
    f.band = parts[1];
    f.channel_a = parts[2];
    f.channel_b = parts[3];
  } else {
    throw ParameterError("feature name '" + name + "' is not canonical");
  }
  for (const auto& p : parts)
    if (p.empty()) throw ParameterError("feature name '" + name + "' is not canonical");
  return f;
}

double FeatureVector::at(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw LookupError(name, "feature vector");
}

BandPower band_power(const Epoch& epoch, const BandSpec& band) {
  const std::size_t n = epoch.n_samples();
  const double rate = epoch.sampling_rate_hz;
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz))
    throw ParameterError("band_power: band " + band.name + " needs 0 < low < high");
  if (static_cast<double>(n) + 1e-9 < rate)
    throw ParameterError("band_power: epoch shorter than one second cannot resolve 1 Hz bins");

  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k <= n / 2; ++k)
    if (band.contains(static_cast<double>(k) * rate / static_cast<double>(n))) bins.push_back(k);
  if (bins.empty()) throw ParameterError("band_power: no DFT bins inside band " + band.name);

  BandPower out;
  for (std::size_t c = 0; c < epoch.n_channels(); ++c) {
    const auto power = power_spectrum(epoch.data.row(c));
    double sum = 0.0;
    for (auto k : bins) sum += power[k];
    const bool floored = !(sum > kPowerFloor);
    out.log10_power.push_back(std::log10(floored ? kPowerFloor : sum));
    out.floored.push_back(floored);
  }
  return out;
}

std::vector<double> windowed_average(const Epoch& epoch, double window_sec, const WindowFeatureFn& fn) {
  const std::size_t w = window_samples(epoch, window_sec);
  if (w == 0 || epoch.n_samples() < w)
    throw ParameterError("windowed_average: epoch of " + std::to_string(epoch.duration_sec()) +
                         " s is shorter than one " + std::to_string(window_sec) + " s window");
  const std::size_t count = epoch.n_samples() / w;
  std::vector<double> acc;
  for (std::size_t i = 0; i < count; ++i) {
    const auto values = fn(window_of(epoch, i * w, w));
    if (i == 0) {
      acc = values;
    } else {
      if (values.size() != acc.size()) throw ParameterError("windowed_average: feature length changed between windows");
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += values[k];
    }
  }
  for (double& v : acc) v /= static_cast<double>(count);
  return acc;
}

std::vector<std::string> feature_names(const std::vector<std::string>& channels, const std::vector<BandSpec>& bands) {
  std::vector<std::string> names;
  for (const auto& band : bands)
    for (const auto& ch : channels) names.push_back(FeatureName{FeatureKind::bp, band.name, ch, {}}.str());
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t j = i; j < channels.size(); ++j)
      names.push_back(FeatureName{FeatureKind::mi, {}, channels[i], channels[j]}.str());
  for (const auto& band : bands)
    for (std::size_t i = 0; i < channels.size(); ++i)
      for (std::size_t j = i + 1; j < channels.size(); ++j)
        names.push_back(FeatureName{FeatureKind::coh, band.name, channels[i], channels[j]}.str());
  return names;
}

FeatureVector extract_all(const Epoch& epoch, const FeatureOptions& options) {
  if (epoch.n_channels() != kSubsetChannels)
    throw ParameterError("extract_all: expected " + std::to_string(kSubsetChannels) + " channels, got " +
                         std::to_string(epoch.n_channels()));
  if (epoch.channel_labels.size() != epoch.n_channels())
    throw ParameterError("extract_all: channel label count does not match data");

  FeatureVector fv;
  fv.names = feature_names(epoch.channel_labels, options.bands);
  fv.values.reserve(fv.names.size());

  for (const auto& band : options.bands) {
    const auto bp = band_power(epoch, band);
    fv.values.insert(fv.values.end(), bp.log10_power.begin(), bp.log10_power.end());
    for (bool f : bp.floored) fv.floored_band_powers += f;
  }

  const bool windowed = epoch.n_samples() > window_samples(epoch, options.window_sec);
  std::vector<double> mi, coh;
  if (windowed) {
    mi = windowed_average(epoch, options.window_sec, [&](const Epoch& w) {
      return mi_block(w, options.mi_bins, fv.degenerate_mi);
    });
    coh = windowed_average(epoch, options.window_sec,
                           [&](const Epoch& w) { return coherence_band_features(w, options.bands, options.welch); });
  } else {
    mi = mi_block(epoch, options.mi_bins, fv.degenerate_mi);
    coh = coherence_band_features(epoch, options.bands, options.welch);
  }
  fv.values.insert(fv.values.end(), mi.begin(), mi.end());
  fv.values.insert(fv.values.end(), coh.begin(), coh.end());

  for (double v : fv.values)
    if (!std::isfinite(v)) throw ParameterError("extract_all: non-finite feature value (non-finite input samples?)");
  return fv;
}

std::vector<FeatureVector> extract_all(const std::vector<Epoch>& epochs, const FeatureOptions& options) {
  std::vector<FeatureVector> out(epochs.size());
  parallel_for(epochs.size(), [&](std::size_t i) { out[i] = extract_all(epochs[i], options); });
  return out;
}

}  // namespace ewb
