#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ewb {

// Second-order section, transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  // Complex response of one forward pass at freq_hz.
  std::complex<double> response(double freq_hz, double sampling_rate_hz) const;

  // Single forward pass. zi, if non-empty, holds two state values per section.
  std::vector<double> apply(std::span<const double> x, std::span<const double> zi = {}) const;

  // Per-section steady-state initial conditions for a unit step input.
  std::vector<double> step_initial_state() const;

  // Odd-extension length used by filtfilt; inputs must be strictly longer.
  std::size_t pad_length() const noexcept { return 3 * (2 * sections_.size() + 1); }

  // Zero-phase forward-backward filtering with odd-extension padding and
  // steady-state initial conditions. Throws InsufficientDataError when the
  // input is not longer than pad_length().
  std::vector<double> filtfilt(std::span<const double> x) const;

 private:
  std::vector<Biquad> sections_;
};

// Butterworth designs via the prewarped bilinear transform. order must be even.
SosFilter butterworth_lowpass(int order, double cutoff_hz, double sampling_rate_hz);
SosFilter butterworth_highpass(int order, double cutoff_hz, double sampling_rate_hz);
// Cascade of an order-`order` high-pass at low_hz and an order-`order`
// low-pass at high_hz.
SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double sampling_rate_hz);

}  // namespace ewb
