#include "ewb/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ewb/errors.hpp"

namespace ewb {
namespace {

struct Layout {
  std::size_t length;
  std::size_t hop;
  std::size_t count;
  std::size_t nfft;
};

Layout layout(std::size_t n, double rate, const WelchParams& p) {
  if (!(p.segment_sec > 0.0) || !(p.overlap >= 0.0 && p.overlap < 1.0) || !(p.resolution_hz > 0.0))
    throw ParameterError("welch: invalid segment length, overlap or resolution");
  Layout l{};
  l.length = static_cast<std::size_t>(std::llround(p.segment_sec * rate));
  if (l.length < 2) throw ParameterError("welch: segment shorter than two samples");
  l.hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(l.length) * (1.0 - p.overlap))));
  l.count = n < l.length ? 0 : (n - l.length) / l.hop + 1;
  if (l.count < 2)
    throw ParameterError("msc_spectrum: " + std::to_string(n) + " samples give " + std::to_string(l.count) +
                         " Welch segment(s); at least 2 are required");
  l.nfft = std::max(l.length, static_cast<std::size_t>(std::llround(rate / p.resolution_hz)));
  return l;
}

}  // namespace

SegmentSpectra welch_segments(std::span<const double> x, double rate, const WelchParams& params) {
  const Layout l = layout(x.size(), rate, params);
  std::vector<double> window(l.length);
  for (std::size_t i = 0; i < l.length; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(l.length));

  SegmentSpectra out;
  const std::size_t n_bins = l.nfft / 2 + 1;
  out.freqs_hz.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) out.freqs_hz[k] = static_cast<double>(k) * rate / static_cast<double>(l.nfft);

  std::vector<double> buffer(l.nfft);
  for (std::size_t s = 0; s < l.count; ++s) {
    const auto seg = x.subspan(s * l.hop, l.length);
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(l.length);
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (std::size_t i = 0; i < l.length; ++i) buffer[i] = (seg[i] - mean) * window[i];
    auto spec = fft(std::span<const double>(buffer));
    spec.resize(n_bins);
    out.segments.push_back(std::move(spec));
  }
  return out;
}

std::vector<double> msc_from_segments(const SegmentSpectra& x, const SegmentSpectra& y) {
  if (x.segments.size() != y.segments.size() || x.freqs_hz.size() != y.freqs_hz.size())
    throw ParameterError("msc: segment layouts differ");
  const std::size_t n_bins = x.freqs_hz.size();
  std::vector<double> out(n_bins, 0.0);
  for (std::size_t k = 0; k < n_bins; ++k) {
    cplx pxy{};
    double pxx = 0.0, pyy = 0.0;
    for (std::size_t s = 0; s < x.segments.size(); ++s) {
      const cplx a = x.segments[s][k];
      const cplx b = y.segments[s][k];
      pxy += std::conj(a) * b;
      pxx += (std::conj(a) * a).real();
      pyy += (std::conj(b) * b).real();
    }
    const double denom = pxx * pyy;
    if (!(denom > 0.0)) continue;
    out[k] = std::clamp(std::norm(pxy) / denom, 0.0, 1.0);
  }
  return out;
}

CoherenceSpectrum msc_spectrum(std::span<const double> x, std::span<const double> y, double rate,
                               const WelchParams& params) {
  if (x.size() != y.size()) throw ParameterError("msc_spectrum: series lengths differ");
  const auto sx = welch_segments(x, rate, params);
  const auto sy = welch_segments(y, rate, params);
  return {sx.freqs_hz, msc_from_segments(sx, sy), sx.segments.size()};
}

std::vector<double> coherence_band_features(const Epoch& epoch, const std::vector<BandSpec>& bands,
                                            const WelchParams& params) {
  const std::size_t n_ch = epoch.n_channels();
  std::vector<SegmentSpectra> spectra;
  spectra.reserve(n_ch);
  for (std::size_t c = 0; c < n_ch; ++c) spectra.push_back(welch_segments(epoch.data.row(c), epoch.sampling_rate_hz, params));
  if (n_ch == 0) return {};

  const auto& freqs = spectra.front().freqs_hz;
  std::vector<std::vector<std::size_t>> band_bins;
  for (const auto& band : bands) {
    std::vector<std::size_t> bins;
    for (std::size_t k = 0; k < freqs.size(); ++k)
      if (band.contains(freqs[k])) bins.push_back(k);
    if (bins.empty()) throw ParameterError("coherence_band_features: no spectral bins inside band " + band.name);
    band_bins.push_back(std::move(bins));
  }

  std::vector<std::vector<double>> pair_msc;
  for (std::size_t i = 0; i < n_ch; ++i)
    for (std::size_t j = i + 1; j < n_ch; ++j) pair_msc.push_back(msc_from_segments(spectra[i], spectra[j]));

  std::vector<double> out;
  out.reserve(bands.size() * pair_msc.size());
  for (const auto& bins : band_bins)
    for (const auto& msc : pair_msc) {
      double sum = 0.0;
      for (auto k : bins) sum += msc[k];
      out.push_back(sum);
    }
  return out;
}

}  // namespace ewb
