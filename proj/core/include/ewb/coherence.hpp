#pragma once

#include <span>
#include <vector>

#include "ewb/fft.hpp"
#include "ewb/signal.hpp"

namespace ewb {

// Welch estimator settings. Segment length is round(segment_sec * rate)
// samples, hop is floor(length * (1 - overlap)), every segment is mean-removed
// and Hann-windowed (periodic form), then zero-padded to a DFT length that puts
// bins resolution_hz apart. At 250 Hz the defaults give 31-sample segments,
// a 15-sample hop, 15 segments per second of data and 1 Hz bins.
struct WelchParams {
  double segment_sec = 0.125;
  double overlap = 0.5;
  double resolution_hz = 1.0;
};

struct CoherenceSpectrum {
  std::vector<double> freqs_hz;
  std::vector<double> values;  // in [0, 1]
  std::size_t segments = 0;
};

// Per-series Welch segment spectra, reusable across channel pairs.
struct SegmentSpectra {
  std::vector<std::vector<cplx>> segments;  // [segment][bin], bins 0 .. nfft/2
  std::vector<double> freqs_hz;
};

SegmentSpectra welch_segments(std::span<const double> x, double sampling_rate_hz, const WelchParams& params = {});

// |Pxy|^2 / (Pxx Pyy) per bin from precomputed segment spectra. Bins where
// either auto-spectrum is zero report 0.
std::vector<double> msc_from_segments(const SegmentSpectra& x, const SegmentSpectra& y);

// Magnitude-squared coherence. Throws ParameterError when fewer than two
// segments fit in the series or the lengths differ.
CoherenceSpectrum msc_spectrum(std::span<const double> x, std::span<const double> y, double sampling_rate_hz,
                               const WelchParams& params = {});

// For every unordered channel pair (i < j, channel order of the epoch) and
// every band, the sum of coherence bins with frequency in [low, high).
// Output is band-major, pair-minor: 3 bands x 21 pairs = 63 for 7 channels.
std::vector<double> coherence_band_features(const Epoch& epoch, const std::vector<BandSpec>& bands,
                                            const WelchParams& params = {});

}  // namespace ewb
