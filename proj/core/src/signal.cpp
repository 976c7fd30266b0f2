#include "ewb/signal.hpp"

#include <cmath>
#include <set>

#include "ewb/butterworth.hpp"
#include "ewb/errors.hpp"

namespace ewb {
namespace {

constexpr int kFilterOrder = 4;

std::vector<std::size_t> resolve(const std::vector<std::string>& have, const std::vector<std::string>& want,
                                 const char* context) {
  std::vector<std::size_t> idx;
  idx.reserve(want.size());
  for (const auto& label : want) {
    std::size_t i = 0;
    while (i < have.size() && have[i] != label) ++i;
    if (i == have.size()) throw LookupError(label, context);
    idx.push_back(i);
  }
  return idx;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Matrix filter_rows(const Matrix& m, const SosFilter& filter) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto y = filter.filtfilt(m.row(r));
    std::copy(y.begin(), y.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

Recording::Recording(std::vector<std::string> channel_labels, double sampling_rate_hz, Matrix data,
                     std::optional<std::string> reference_label)
    : labels_(std::move(channel_labels)),
      rate_(sampling_rate_hz),
      data_(std::move(data)),
      reference_(std::move(reference_label)) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw ParameterError("recording: sampling rate must be positive");
  if (labels_.size() != data_.rows())
    throw ParameterError("recording: " + std::to_string(labels_.size()) + " labels for " +
                         std::to_string(data_.rows()) + " data rows");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw ParameterError("recording: duplicate channel label '" + l + "'");
  if (reference_) {
    const auto row = data_.row(channel_index(*reference_));
    for (double v : row)
      if (v != 0.0) throw ParameterError("recording: reference channel '" + *reference_ + "' is not zero");
  }
}

std::size_t Recording::channel_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw LookupError(label, "recording");
}

BandSpec delta_band() { return {"delta", 1.0, 4.0}; }
BandSpec theta_band() { return {"theta", 4.0, 8.0}; }
BandSpec alpha_band() { return {"alpha", 8.0, 13.0}; }
std::vector<BandSpec> canonical_bands() { return {delta_band(), theta_band(), alpha_band()}; }

const std::vector<std::string>& canonical_channels() {
  static const std::vector<std::string> labels{"F3", "F4", "Fz", "Pz", "AFz", "CPz", "POz"};
  return labels;
}

Recording bandpass_filter(const Recording& rec, double low_hz, double high_hz) {
  const double nyquist = rec.sampling_rate_hz() / 2.0;
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist))
    throw ParameterError("bandpass_filter: need 0 < low < high < Nyquist (" + std::to_string(nyquist) + " Hz)");
  const auto filter = butterworth_bandpass(kFilterOrder, low_hz, high_hz, rec.sampling_rate_hz());
  return Recording(rec.channel_labels(), rec.sampling_rate_hz(), filter_rows(rec.data(), filter),
                   rec.reference_label());
}

Recording rereference(const Recording& rec, const std::string& ref_label) {
  const std::size_t ref = rec.channel_index(ref_label);
  Matrix out = rec.data();
  const auto ref_row = rec.data().row(ref);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    if (r == ref) continue;
    auto row = out.row(r);
    for (std::size_t t = 0; t < row.size(); ++t) row[t] -= ref_row[t];
  }
  for (double& v : out.row(ref)) v = 0.0;
  return Recording(rec.channel_labels(), rec.sampling_rate_hz(), std::move(out), ref_label);
}

Recording downsample(const Recording& rec, double target_hz) {
  if (!(target_hz > 0.0)) throw ParameterError("downsample: target rate must be positive");
  const double ratio = rec.sampling_rate_hz() / target_hz;
  const double k_rounded = std::round(ratio);
  if (k_rounded < 1.0 || std::abs(ratio - k_rounded) > 1e-9 * ratio)
    throw ParameterError("downsample: " + std::to_string(rec.sampling_rate_hz()) + " Hz -> " +
                         std::to_string(target_hz) + " Hz is not an integer ratio");
  const auto k = static_cast<std::size_t>(k_rounded);
  if (k == 1) return rec;

  const auto filter = butterworth_lowpass(kFilterOrder, 0.8 * target_hz / 2.0, rec.sampling_rate_hz());
  const Matrix smoothed = filter_rows(rec.data(), filter);
  const std::size_t n_out = (rec.n_samples() + k - 1) / k;
  Matrix out(rec.n_channels(), n_out);
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t t = 0; t < n_out; ++t) out(r, t) = smoothed(r, t * k);
  // Keep the reference row exactly zero after filtering.
  if (rec.reference_label())
    for (double& v : out.row(rec.channel_index(*rec.reference_label()))) v = 0.0;
  return Recording(rec.channel_labels(), target_hz, std::move(out), rec.reference_label());
}

Epoch cut_epoch(const Recording& rec, long first_sample, std::size_t n_samples, const EventMarker& event) {
  if (first_sample < 0 || static_cast<std::size_t>(first_sample) + n_samples > rec.n_samples())
    throw OutOfBoundsError({}, "epoch window outside recording");
  Epoch e;
  e.channel_labels = rec.channel_labels();
  e.sampling_rate_hz = rec.sampling_rate_hz();
  e.class_label = event.class_label;
  e.block_id = event.block_id;
  e.onset_sec = static_cast<double>(first_sample) / rec.sampling_rate_hz();
  e.data = Matrix(rec.n_channels(), n_samples);
  for (std::size_t r = 0; r < rec.n_channels(); ++r) {
    auto src = rec.data().row(r).subspan(static_cast<std::size_t>(first_sample), n_samples);
    std::copy(src.begin(), src.end(), e.data.row(r).begin());
  }
  return e;
}

std::vector<Epoch> extract_epochs(const Recording& rec, const std::vector<EventMarker>& events, TimeWindow window) {
  if (!(window.start_sec < window.end_sec)) throw ParameterError("extract_epochs: window start must precede end");
  const double rate = rec.sampling_rate_hz();
  const auto n = static_cast<std::size_t>(std::llround((window.end_sec - window.start_sec) * rate));
  if (n == 0) throw ParameterError("extract_epochs: window shorter than one sample");

  std::vector<std::size_t> bad;
  std::vector<long> starts(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (ev.block_id < 0) throw ParameterError("extract_epochs: negative block id at event " + std::to_string(i));
    starts[i] = static_cast<long>(std::llround((ev.time_sec + window.start_sec) * rate));
    if (starts[i] < 0 || static_cast<std::size_t>(starts[i]) + n > rec.n_samples()) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i)
      list += (i ? ", " : "") + std::to_string(bad[i]) + " (t=" + std::to_string(events[bad[i]].time_sec) + ")";
    if (bad.size() > 20) list += ", ...";
    throw OutOfBoundsError(bad, "extract_epochs: window exceeds recording for event(s) " + list);
  }

  std::vector<Epoch> epochs;
  epochs.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) epochs.push_back(cut_epoch(rec, starts[i], n, events[i]));
  return epochs;
}

Recording select_channels(const Recording& rec, const std::vector<std::string>& labels) {
  const auto idx = resolve(rec.channel_labels(), labels, "select_channels");
  std::optional<std::string> ref;
  if (rec.reference_label())
    for (const auto& l : labels)
      if (l == *rec.reference_label()) ref = l;
  return Recording(labels, rec.sampling_rate_hz(), gather_rows(rec.data(), idx), ref);
}

Epoch select_channels(const Epoch& epoch, const std::vector<std::string>& labels) {
  const auto idx = resolve(epoch.channel_labels, labels, "select_channels");
  Epoch out = epoch;
  out.channel_labels = labels;
  out.data = gather_rows(epoch.data, idx);
  return out;
}

}  // namespace ewb
