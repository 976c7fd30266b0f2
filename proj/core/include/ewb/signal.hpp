#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewb/matrix.hpp"

namespace ewb {

enum class ClassLabel : int { low = 0, high = 1 };

// Multichannel recording, data[channel][sample] in microvolts.
// Invariants are checked on construction; instances are immutable.
class Recording {
 public:
  Recording(std::vector<std::string> channel_labels, double sampling_rate_hz, Matrix data,
            std::optional<std::string> reference_label = std::nullopt);

  const std::vector<std::string>& channel_labels() const noexcept { return labels_; }
  double sampling_rate_hz() const noexcept { return rate_; }
  const Matrix& data() const noexcept { return data_; }
  const std::optional<std::string>& reference_label() const noexcept { return reference_; }

  std::size_t n_channels() const noexcept { return data_.rows(); }
  std::size_t n_samples() const noexcept { return data_.cols(); }
  double duration_sec() const noexcept { return static_cast<double>(n_samples()) / rate_; }

  // Row index of label; throws LookupError.
  std::size_t channel_index(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  double rate_;
  Matrix data_;
  std::optional<std::string> reference_;
};

struct EventMarker {
  double time_sec = 0.0;
  ClassLabel class_label = ClassLabel::low;
  int block_id = 0;
};

// Event-locked copy of a recording slab.
struct Epoch {
  std::vector<std::string> channel_labels;
  Matrix data;
  double sampling_rate_hz = 0.0;
  ClassLabel class_label = ClassLabel::low;
  int block_id = 0;
  double onset_sec = 0.0;  // recording time of the first sample

  std::size_t n_channels() const noexcept { return data.rows(); }
  std::size_t n_samples() const noexcept { return data.cols(); }
  double duration_sec() const noexcept { return static_cast<double>(n_samples()) / sampling_rate_hz; }
};

// Frequency band, half-open [low_hz, high_hz).
struct BandSpec {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;

  bool contains(double f) const noexcept { return f >= low_hz && f < high_hz; }
};

BandSpec delta_band();
BandSpec theta_band();
BandSpec alpha_band();
std::vector<BandSpec> canonical_bands();
// F3, F4, Fz, Pz, AFz, CPz, POz.
const std::vector<std::string>& canonical_channels();

struct TimeWindow {
  double start_sec = 0.0;
  double end_sec = 0.0;
};

// Zero-phase 4th-order Butterworth band-pass applied to every channel.
Recording bandpass_filter(const Recording& rec, double low_hz, double high_hz);

// Subtracts the reference channel from every channel.
Recording rereference(const Recording& rec, const std::string& ref_label);

// Anti-alias low-pass at 0.8 x the target Nyquist, then keeps every k-th sample.
Recording downsample(const Recording& rec, double target_hz);

// One epoch per event, in event order. Sample count is round((end-start) * rate);
// the first sample is round((event + start) * rate).
std::vector<Epoch> extract_epochs(const Recording& rec, const std::vector<EventMarker>& events,
                                  TimeWindow window);

// Copies a single window [start_sec, start_sec + n_samples / rate) out of a
// recording. Throws OutOfBoundsError when it does not fit.
Epoch cut_epoch(const Recording& rec, long first_sample, std::size_t n_samples, const EventMarker& event);

Recording select_channels(const Recording& rec, const std::vector<std::string>& labels);
Epoch select_channels(const Epoch& epoch, const std::vector<std::string>& labels);

}  // namespace ewb
