#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ewb/dynamics.hpp"
#include "ewb/eval.hpp"
#include "ewb/features.hpp"
#include "ewb/synth.hpp"

namespace ewb {

struct PreprocessConfig {
  double bandpass_low_hz = 0.1;
  double bandpass_high_hz = 50.0;
  std::optional<std::string> reference;  // channel to subtract, none by default
  std::optional<double> target_rate_hz;  // downsample target, none keeps the input rate
  bool operator==(const PreprocessConfig&) const = default;
};

struct EpochConfig {
  double start_sec = -1.0;  // window relative to each event
  double end_sec = 0.0;
  bool operator==(const EpochConfig&) const = default;
};

struct EvaluationConfig {
  std::vector<std::size_t> ng_sweep{1, 2, 4, 8};
  SvmParams svm{};
  CvScheme cv = CvScheme::cross_block;
  std::size_t k = 5;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  std::optional<double> top_percent;
};

struct StatisticsConfig {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  std::size_t signature_k = 5;
  bool operator==(const StatisticsConfig&) const = default;
};

struct PathsConfig {
  std::optional<std::string> in;
  std::optional<std::string> out;
  bool operator==(const PathsConfig&) const = default;
};

// Everything a pipeline run depends on besides its input files.
struct PipelineConfig {
  std::vector<std::string> channels = canonical_channels();
  FeatureOptions features{};
  PreprocessConfig preprocess{};
  EpochConfig epoch{};
  EvaluationConfig evaluation{};
  StatisticsConfig statistics{};
  TimeCourseOptions dynamics{};  // channels and features are taken from the fields above
  SynthConfig synth = default_synth_config();
  PathsConfig paths{};

  // Throws ValidationError listing every conflicting key (dotted paths).
  void validate() const;
  std::string to_json() const;
  // Missing keys keep their defaults; unknown keys raise ValidationError.
  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig load(const std::string& path);

  Splitter splitter() const;
  TimeCourseOptions time_course_options() const;
};

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace ewb
