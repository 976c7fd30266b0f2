#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ewb/dynamics.hpp"
#include "ewb/eval.hpp"
#include "ewb/features.hpp"
#include "ewb/ranking.hpp"
#include "ewb/signal.hpp"

namespace ewb {

namespace fs = std::filesystem;

// 17 significant digits, "%.17g"; parses back to the same double.
std::string format_double(double v);

std::string read_text(const fs::path& path);
// Writes atomically enough for our purposes: truncate and write.
void write_text(const fs::path& path, const std::string& text);

// Sidecar metadata path: the CSV path with its extension replaced by .json.
fs::path sidecar_path(const fs::path& csv);

// Recording CSV: header row of channel labels, one row per sample.
// Sidecar JSON: {"sampling_rate_hz": <number>, "reference": <string|null>}.
void write_recording(const fs::path& csv, const Recording& rec);
Recording read_recording(const fs::path& csv);

// Events CSV: header time_sec,class_label,block_id.
void write_events(const fs::path& csv, const std::vector<EventMarker>& events);
std::vector<EventMarker> read_events(const fs::path& csv);

// Epochs CSV: header epoch_index,class_label,block_id,onset_sec,sample,<channels...>,
// one row per sample of each epoch. Sidecar JSON: {"sampling_rate_hz": <number>}.
void write_epochs(const fs::path& csv, const std::vector<Epoch>& epochs);
std::vector<Epoch> read_epochs(const fs::path& csv);

// Feature matrix CSV: header <feature names...>,class_label,block_id,epoch_index.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<int> class_labels;
  std::vector<int> block_ids;
  std::vector<long> epoch_index;

  LabeledFeatureSet to_labeled_set() const;
};
FeatureTable make_feature_table(const std::vector<FeatureVector>& features, const std::vector<Epoch>& epochs);
void write_features(const fs::path& csv, const FeatureTable& table);
FeatureTable read_features(const fs::path& csv);

// Feature scores CSV: header feature,f_value; infinity written as "inf".
void write_scores(const fs::path& csv, const std::vector<FeatureScore>& scores);
std::vector<FeatureScore> read_scores(const fs::path& csv);

// Time course CSV: header time_sec,mean,std_err,n; missing values written as NA.
void write_time_course(const fs::path& csv, const TimeCourse& tc);
TimeCourse read_time_course(const fs::path& csv);

// Minimal SVG line plot of a time course with a +-1 standard-error band.
std::string time_course_svg(const TimeCourse& tc, const std::string& title);

}  // namespace ewb
