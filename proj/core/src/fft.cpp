#include "ewb/fft.hpp"

#include <cmath>
#include <numbers>

namespace ewb {
namespace {

std::size_t smallest_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return f;
  return n;
}

struct Plan {
  std::size_t size;
  std::vector<cplx> twiddle;  // exp(-2 pi i j / size)

  explicit Plan(std::size_t n) : size(n), twiddle(n) {
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddle[j] = {std::cos(angle), std::sin(angle)};
    }
  }
};

// Writes the n-point DFT of in[0], in[stride], ... into out[0..n).
void transform(const Plan& plan, const cplx* in, std::size_t stride, std::size_t n, cplx* out,
               std::vector<cplx>& scratch) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t step = plan.size / n;  // twiddle index scale for this level
  std::size_t p = smallest_factor(n);
  if (p == n) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx acc{};
      for (std::size_t t = 0; t < n; ++t) acc += in[t * stride] * plan.twiddle[((k * t) % n) * step];
      out[k] = acc;
    }
    return;
  }
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) transform(plan, in + r * stride, stride * p, m, out + r * m, scratch);

  scratch.resize(std::max(scratch.size(), p));
  std::vector<cplx> column(p);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < p; ++r) column[r] = out[r * m + k] * plan.twiddle[(r * k) * step];
    for (std::size_t q = 0; q < p; ++q) {
      cplx acc{};
      for (std::size_t r = 0; r < p; ++r) acc += column[r] * plan.twiddle[((r * q * m) % n) * step];
      scratch[q] = acc;
    }
    for (std::size_t q = 0; q < p; ++q) out[q * m + k] = scratch[q];
  }
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> x) {
  std::vector<cplx> out(x.size());
  if (x.empty()) return out;
  Plan plan(x.size());
  std::vector<cplx> scratch;
  transform(plan, x.data(), 1, x.size(), out.data(), scratch);
  return out;
}

std::vector<cplx> fft(std::span<const double> x) {
  std::vector<cplx> c(x.begin(), x.end());
  return fft(std::span<const cplx>(c));
}

std::vector<cplx> ifft(std::span<const cplx> x) {
  std::vector<cplx> conj(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) conj[i] = std::conj(x[i]);
  auto out = fft(std::span<const cplx>(conj));
  const double scale = x.empty() ? 1.0 : 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v = std::conj(v) * scale;
  return out;
}

std::vector<double> power_spectrum(std::span<const double> x) {
  const auto spectrum = fft(x);
  std::vector<double> power(x.size() / 2 + 1);
  for (std::size_t k = 0; k < power.size() && k < spectrum.size(); ++k) power[k] = std::norm(spectrum[k]);
  return power;
}

}  // namespace ewb
