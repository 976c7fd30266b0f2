#include "ewb/dynamics.hpp"

#include <cmath>
#include <limits>

#include "ewb/errors.hpp"
#include "ewb/parallel.hpp"

namespace ewb {

std::vector<double> step_grid(double t_min, double t_max, double step_sec) {
  if (!(step_sec > 0.0)) throw ParameterError("step_grid: step must be positive");
  if (!(t_max >= t_min)) throw ParameterError("step_grid: span end precedes start");
  const auto steps = static_cast<std::size_t>(std::llround((t_max - t_min) / step_sec));
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) grid[i] = t_min + static_cast<double>(i) * step_sec;
  return grid;
}

SubjectSeries signature_time_course(const Recording& rec, const std::vector<EventMarker>& events,
                                    const SignatureDef& def, const TimeCourseOptions& options) {
  def.validate();
  if (!(options.window_sec > 0.0)) throw ParameterError("signature_time_course: window must be positive");
  const Recording subset = select_channels(rec, options.channels);
  const double rate = subset.sampling_rate_hz();
  const auto n = static_cast<std::size_t>(std::llround(options.window_sec * rate));

  SubjectSeries out;
  out.times_sec = step_grid(options.t_min, options.t_max, options.step_sec);
  const std::size_t steps = out.times_sec.size();
  const std::size_t n_events = events.size();

  // value per (step, event); NaN when skipped
  std::vector<double> cell(steps * n_events, std::numeric_limits<double>::quiet_NaN());
  parallel_for(steps * n_events, [&](std::size_t idx) {
    const std::size_t s = idx / n_events;
    const std::size_t e = idx % n_events;
    const double center = events[e].time_sec + out.times_sec[s];
    const long first = std::lround((center - options.window_sec / 2.0) * rate);
    if (first < 0 || static_cast<std::size_t>(first) + n > subset.n_samples()) return;
    const Epoch epoch = cut_epoch(subset, first, n, events[e]);
    cell[idx] = signature_value(def, extract_all(epoch, options.features));
  });

  for (std::size_t s = 0; s < steps; ++s) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t e = 0; e < n_events; ++e) {
      const double v = cell[s * n_events + e];
      if (std::isnan(v)) continue;
      sum += v;
      ++used;
    }
    out.values.push_back(used > 0 ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN());
    out.events_used.push_back(used);
    out.events_skipped.push_back(n_events - used);
  }
  return out;
}

TimeCourse aggregate_subjects(const std::vector<SubjectSeries>& series) {
  if (series.empty()) throw ParameterError("aggregate_subjects: no subject series");
  const auto& grid = series.front().times_sec;
  for (const auto& s : series) {
    if (s.times_sec.size() != grid.size() || s.values.size() != grid.size())
      throw ParameterError("aggregate_subjects: subjects use different step grids");
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(s.times_sec[i] - grid[i]) > 1e-12)
        throw ParameterError("aggregate_subjects: subjects use different step grids");
  }
  TimeCourse tc;
  tc.times_sec = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : series)
      if (!std::isnan(s.values[i])) {
        sum += s.values[i];
        ++n;
      }
    const double mean = n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    double se = n > 0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    if (n > 1) {
      double ss = 0.0;
      for (const auto& s : series)
        if (!std::isnan(s.values[i])) ss += (s.values[i] - mean) * (s.values[i] - mean);
      se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    tc.mean.push_back(mean);
    tc.std_err.push_back(se);
    tc.n_subjects.push_back(n);
  }
  return tc;
}

}  // namespace ewb
