#pragma once

#include <cstddef>
#include <span>

namespace ewb {

struct MutualInformation {
  double nats = 0.0;
  bool degenerate = false;  // a squared series was constant; nats is 0
};

// Histogram estimate of the mutual information between the power (squared)
// series of x and y. Each squared series is binned into `bins` equal-width
// bins over its own [min, max]; the maximum falls in the top bin.
MutualInformation mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins = 64);

// Entropy (nats) of the squared series under the same binning.
double power_entropy(std::span<const double> x, std::size_t bins = 64);

}  // namespace ewb
