#pragma once

#include <string>
#include <vector>

#include "ewb/features.hpp"
#include "ewb/signal.hpp"
#include "ewb/signature.hpp"

namespace ewb {

struct TimeCourseOptions {
  double window_sec = 1.0;
  double step_sec = 0.2;
  double t_min = -1.0;
  double t_max = 1.0;
  std::vector<std::string> channels = canonical_channels();
  FeatureOptions features{};
};

// Per-subject signature series on the step grid. Missing steps (every event
// window out of bounds) hold NaN.
struct SubjectSeries {
  std::vector<double> times_sec;
  std::vector<double> values;
  std::vector<std::size_t> events_used;
  std::vector<std::size_t> events_skipped;
};

struct TimeCourse {
  std::vector<double> times_sec;
  std::vector<double> mean;
  std::vector<double> std_err;
  std::vector<std::size_t> n_subjects;
};

// Step times t_min + i * step for i = 0 .. round((t_max - t_min) / step).
std::vector<double> step_grid(double t_min, double t_max, double step_sec);

// At each step time tau, cuts a window of window_sec centered on
// event + tau for every event, extracts features, evaluates the signature
// and averages over events. Windows that leave the recording are skipped.
SubjectSeries signature_time_course(const Recording& rec, const std::vector<EventMarker>& events,
                                    const SignatureDef& def, const TimeCourseOptions& options = {});

// Mean and standard error (sample std / sqrt(n)) across subjects per step,
// ignoring missing values. n = 1 gives std_err 0.
TimeCourse aggregate_subjects(const std::vector<SubjectSeries>& series);

}  // namespace ewb
