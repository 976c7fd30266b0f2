#include "ewb/butterworth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ewb/errors.hpp"

namespace ewb {
namespace {

enum class Kind { lowpass, highpass };

SosFilter design(Kind kind, int order, double cutoff_hz, double fs) {
  if (order <= 0 || order % 2 != 0) throw ParameterError("butterworth: order must be a positive even number");
  if (!(fs > 0.0)) throw ParameterError("butterworth: sampling rate must be positive");
  if (!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0))
    throw ParameterError("butterworth: cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, Nyquist)");

  const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    // Pole pair i of the analog prototype has damping 1/Q = 2 sin((2i+1) pi / 2N).
    const double inv_q = 2.0 * std::sin(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order));
    const double norm = 1.0 / (1.0 + k * inv_q + k2);
    Biquad s;
    if (kind == Kind::lowpass) {
      s.b0 = k2 * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k * inv_q + k2) * norm;
    sections.push_back(s);
  }
  return SosFilter(std::move(sections));
}

}  // namespace

std::complex<double> SosFilter::response(double freq_hz, double fs) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / fs;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections_) h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return h;
}

std::vector<double> SosFilter::apply(std::span<const double> x, std::span<const double> zi) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t si = 0; si < sections_.size(); ++si) {
    const auto& s = sections_[si];
    double z1 = zi.empty() ? 0.0 : zi[2 * si];
    double z2 = zi.empty() ? 0.0 : zi[2 * si + 1];
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> SosFilter::step_initial_state() const {
  std::vector<double> zi(2 * sections_.size());
  double scale = 1.0;  // steady-state level entering the current section
  for (std::size_t si = 0; si < sections_.size(); ++si) {
    const auto& s = sections_[si];
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double z2 = s.b2 - s.a2 * gain;
    const double z1 = s.b1 - s.a1 * gain + z2;
    zi[2 * si] = z1 * scale;
    zi[2 * si + 1] = z2 * scale;
    scale *= gain;
  }
  return zi;
}

std::vector<double> SosFilter::filtfilt(std::span<const double> x) const {
  const std::size_t pad = pad_length();
  const std::size_t n = x.size();
  if (n <= pad)
    throw InsufficientDataError("filtfilt: need more than " + std::to_string(pad) + " samples, got " +
                                std::to_string(n));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const std::vector<double> zi = step_initial_state();
  std::vector<double> state(zi.size());

  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * ext.front();
  std::vector<double> fwd = apply(ext, state);

  std::vector<double> rev(fwd.rbegin(), fwd.rend());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * rev.front();
  std::vector<double> back = apply(rev, state);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = back[back.size() - 1 - pad - i];
  return out;
}

SosFilter butterworth_lowpass(int order, double cutoff_hz, double fs) {
  return design(Kind::lowpass, order, cutoff_hz, fs);
}

SosFilter butterworth_highpass(int order, double cutoff_hz, double fs) {
  return design(Kind::highpass, order, cutoff_hz, fs);
}

SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double fs) {
  if (!(low_hz < high_hz)) throw ParameterError("butterworth: band-pass requires low < high");
  auto sections = butterworth_highpass(order, low_hz, fs).sections();
  const auto lp = butterworth_lowpass(order, high_hz, fs).sections();
  sections.insert(sections.end(), lp.begin(), lp.end());
  return SosFilter(std::move(sections));
}

}  // namespace ewb
