#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ewb {

using cplx = std::complex<double>;

// Forward DFT, X[k] = sum_t x[t] exp(-2 pi i k t / N), for any N >= 1.
// Mixed-radix decimation in time; prime-length stages use a direct sum.
std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> fft(std::span<const double> x);

// Inverse DFT including the 1/N factor.
std::vector<cplx> ifft(std::span<const cplx> x);

// One-sided squared magnitudes |X[k]|^2 for k = 0 .. N/2 of a real series.
std::vector<double> power_spectrum(std::span<const double> x);

}  // namespace ewb
