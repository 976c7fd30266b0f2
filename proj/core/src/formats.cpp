#include "ewb/formats.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ewb/errors.hpp"

namespace ewb {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw Error("io", "cannot open " + path.string());
    std::string line;
    if (!next_line(line)) throw SchemaError(path_.string(), 1, "", "missing header row");
    header_ = split(line);
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t row_number() const { return row_; }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    if (!next_line(line)) return false;
    fields = split(line);
    if (fields.size() != header_.size())
      throw SchemaError(path_.string(), row_, header_.empty() ? "" : header_.back(),
                        "expected " + std::to_string(header_.size()) + " fields, found " +
                            std::to_string(fields.size()));
    return true;
  }

  double number(const std::string& field, std::size_t column) const {
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "NA") return std::numeric_limits<double>::quiet_NaN();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
      throw SchemaError(path_.string(), row_, header_[column], "'" + field + "' is not a number");
    return v;
  }

  long integer(const std::string& field, std::size_t column) const {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
      throw SchemaError(path_.string(), row_, header_[column], "'" + field + "' is not an integer");
    return v;
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    throw SchemaError(path_.string(), 1, name, "required column missing");
  }

  const fs::path& path() const { return path_; }

 private:
  bool next_line(std::string& line) {
    while (std::getline(in_, line)) {
      ++row_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  fs::path path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t row_ = 0;
};

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string(), 0, "", e.what());
  }
}

int parse_class(const CsvReader& r, const std::string& field, std::size_t column) {
  const long v = r.integer(field, column);
  if (v != 0 && v != 1) throw SchemaError(r.path().string(), r.row_number(), r.header()[column], "class must be 0 or 1");
  return static_cast<int>(v);
}

std::string join_header(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s + "\n";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("io", "write failed for " + path.string());
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

void write_recording(const fs::path& csv, const Recording& rec) {
  std::string text = join_header(rec.channel_labels());
  for (std::size_t t = 0; t < rec.n_samples(); ++t) {
    for (std::size_t c = 0; c < rec.n_channels(); ++c) {
      if (c) text += ',';
      text += format_double(rec.data()(c, t));
    }
    text += '\n';
  }
  write_text(csv, text);
  nlohmann::ordered_json meta;
  meta["sampling_rate_hz"] = rec.sampling_rate_hz();
  meta["reference"] = rec.reference_label() ? nlohmann::ordered_json(*rec.reference_label()) : nlohmann::ordered_json(nullptr);
  write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

Recording read_recording(const fs::path& csv) {
  const auto meta = read_json(sidecar_path(csv));
  const std::string side = sidecar_path(csv).string();
  if (!meta.is_object() || !meta.contains("sampling_rate_hz") || !meta["sampling_rate_hz"].is_number())
    throw SchemaError(side, 0, "sampling_rate_hz", "missing or not a number");
  for (const auto& [key, _] : meta.items())
    if (key != "sampling_rate_hz" && key != "reference") throw SchemaError(side, 0, key, "unknown key");
  std::optional<std::string> ref;
  if (meta.contains("reference") && !meta["reference"].is_null()) {
    if (!meta["reference"].is_string()) throw SchemaError(side, 0, "reference", "must be a string or null");
    ref = meta["reference"].get<std::string>();
  }

  CsvReader reader(csv);
  const auto labels = reader.header();
  std::vector<std::vector<double>> columns(labels.size());
  std::vector<std::string> fields;
  while (reader.next(fields))
    for (std::size_t c = 0; c < fields.size(); ++c) columns[c].push_back(reader.number(fields[c], c));
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  Matrix data(labels.size(), n);
  for (std::size_t c = 0; c < labels.size(); ++c) std::copy(columns[c].begin(), columns[c].end(), data.row(c).begin());
  return Recording(labels, meta["sampling_rate_hz"].get<double>(), std::move(data), ref);
}

void write_events(const fs::path& csv, const std::vector<EventMarker>& events) {
  std::string text = "time_sec,class_label,block_id\n";
  for (const auto& e : events)
    text += format_double(e.time_sec) + "," + std::to_string(static_cast<int>(e.class_label)) + "," +
            std::to_string(e.block_id) + "\n";
  write_text(csv, text);
}

std::vector<EventMarker> read_events(const fs::path& csv) {
  CsvReader reader(csv);
  const auto ct = reader.column("time_sec");
  const auto cc = reader.column("class_label");
  const auto cb = reader.column("block_id");
  std::vector<EventMarker> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    EventMarker e;
    e.time_sec = reader.number(f[ct], ct);
    if (!(e.time_sec >= 0.0)) throw SchemaError(csv.string(), reader.row_number(), "time_sec", "must be >= 0");
    e.class_label = static_cast<ClassLabel>(parse_class(reader, f[cc], cc));
    const long b = reader.integer(f[cb], cb);
    if (b < 0) throw SchemaError(csv.string(), reader.row_number(), "block_id", "must be >= 0");
    e.block_id = static_cast<int>(b);
    out.push_back(e);
  }
  return out;
}

void write_epochs(const fs::path& csv, const std::vector<Epoch>& epochs) {
  std::vector<std::string> header{"epoch_index", "class_label", "block_id", "onset_sec", "sample"};
  double rate = 0.0;
  if (!epochs.empty()) {
    header.insert(header.end(), epochs.front().channel_labels.begin(), epochs.front().channel_labels.end());
    rate = epochs.front().sampling_rate_hz;
  }
  std::string text = join_header(header);
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    const auto& ep = epochs[e];
    if (ep.channel_labels != epochs.front().channel_labels || ep.sampling_rate_hz != rate)
      throw ParameterError("write_epochs: epochs differ in channels or sampling rate");
    const std::string prefix = std::to_string(e) + "," + std::to_string(static_cast<int>(ep.class_label)) + "," +
                               std::to_string(ep.block_id) + "," + format_double(ep.onset_sec) + ",";
    for (std::size_t t = 0; t < ep.n_samples(); ++t) {
      text += prefix + std::to_string(t);
      for (std::size_t c = 0; c < ep.n_channels(); ++c) text += "," + format_double(ep.data(c, t));
      text += '\n';
    }
  }
  write_text(csv, text);
  nlohmann::ordered_json meta;
  meta["sampling_rate_hz"] = rate;
  write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

std::vector<Epoch> read_epochs(const fs::path& csv) {
  const auto meta = read_json(sidecar_path(csv));
  if (!meta.contains("sampling_rate_hz") || !meta["sampling_rate_hz"].is_number())
    throw SchemaError(sidecar_path(csv).string(), 0, "sampling_rate_hz", "missing or not a number");
  const double rate = meta["sampling_rate_hz"].get<double>();

  CsvReader reader(csv);
  const auto& h = reader.header();
  const std::vector<std::string> fixed{"epoch_index", "class_label", "block_id", "onset_sec", "sample"};
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (h.size() <= i || h[i] != fixed[i]) throw SchemaError(csv.string(), 1, fixed[i], "expected at this position");
  const std::vector<std::string> labels(h.begin() + 5, h.end());

  std::vector<Epoch> out;
  std::vector<std::vector<std::vector<double>>> samples;  // [epoch][channel][t]
  std::vector<std::string> f;
  while (reader.next(f)) {
    const long idx = reader.integer(f[0], 0);
    const long sample = reader.integer(f[4], 4);
    if (idx == static_cast<long>(out.size())) {
      if (sample != 0) throw SchemaError(csv.string(), reader.row_number(), "sample", "epoch must start at sample 0");
      Epoch e;
      e.channel_labels = labels;
      e.sampling_rate_hz = rate;
      e.class_label = static_cast<ClassLabel>(parse_class(reader, f[1], 1));
      e.block_id = static_cast<int>(reader.integer(f[2], 2));
      e.onset_sec = reader.number(f[3], 3);
      out.push_back(std::move(e));
      samples.emplace_back(labels.size());
    } else if (idx != static_cast<long>(out.size()) - 1 ||
               sample != static_cast<long>(samples.back().empty() ? 0 : samples.back().front().size())) {
      throw SchemaError(csv.string(), reader.row_number(), "epoch_index", "rows out of order");
    }
    for (std::size_t c = 0; c < labels.size(); ++c) samples.back()[c].push_back(reader.number(f[5 + c], 5 + c));
  }
  for (std::size_t e = 0; e < out.size(); ++e) {
    const std::size_t n = labels.empty() ? 0 : samples[e].front().size();
    out[e].data = Matrix(labels.size(), n);
    for (std::size_t c = 0; c < labels.size(); ++c)
      std::copy(samples[e][c].begin(), samples[e][c].end(), out[e].data.row(c).begin());
  }
  return out;
}

LabeledFeatureSet FeatureTable::to_labeled_set() const {
  LabeledFeatureSet set;
  set.feature_names = names;
  set.x = Matrix(rows.size(), names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), set.x.row(r).begin());
  set.y = class_labels;
  set.block_ids = block_ids;
  set.order_index = epoch_index;
  set.validate();
  return set;
}

FeatureTable make_feature_table(const std::vector<FeatureVector>& features, const std::vector<Epoch>& epochs) {
  if (features.size() != epochs.size()) throw ParameterError("make_feature_table: feature and epoch counts differ");
  FeatureTable t;
  if (!features.empty()) t.names = features.front().names;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].names != t.names) throw ParameterError("make_feature_table: feature names differ between epochs");
    t.rows.push_back(features[i].values);
    t.class_labels.push_back(static_cast<int>(epochs[i].class_label));
    t.block_ids.push_back(epochs[i].block_id);
    t.epoch_index.push_back(static_cast<long>(i));
  }
  return t;
}

void write_features(const fs::path& csv, const FeatureTable& table) {
  auto header = table.names;
  header.insert(header.end(), {"class_label", "block_id", "epoch_index"});
  std::string text = join_header(header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (double v : table.rows[r]) text += format_double(v) + ",";
    text += std::to_string(table.class_labels[r]) + "," + std::to_string(table.block_ids[r]) + "," +
            std::to_string(table.epoch_index[r]) + "\n";
  }
  write_text(csv, text);
}

FeatureTable read_features(const fs::path& csv) {
  CsvReader reader(csv);
  const auto& h = reader.header();
  if (h.size() < 3 || h[h.size() - 3] != "class_label" || h[h.size() - 2] != "block_id" || h.back() != "epoch_index")
    throw SchemaError(csv.string(), 1, "class_label", "last columns must be class_label,block_id,epoch_index");
  FeatureTable t;
  t.names.assign(h.begin(), h.end() - 3);
  for (const auto& name : t.names) {
    try {
      (void)FeatureName::parse(name);
    } catch (const ParameterError&) {
      throw SchemaError(csv.string(), 1, name, "not a canonical feature name");
    }
  }
  const std::size_t d = t.names.size();
  std::vector<std::string> f;
  while (reader.next(f)) {
    std::vector<double> row(d);
    for (std::size_t c = 0; c < d; ++c) {
      row[c] = reader.number(f[c], c);
      if (!std::isfinite(row[c])) throw SchemaError(csv.string(), reader.row_number(), h[c], "non-finite value");
    }
    t.rows.push_back(std::move(row));
    t.class_labels.push_back(parse_class(reader, f[d], d));
    t.block_ids.push_back(static_cast<int>(reader.integer(f[d + 1], d + 1)));
    t.epoch_index.push_back(reader.integer(f[d + 2], d + 2));
  }
  return t;
}

void write_scores(const fs::path& csv, const std::vector<FeatureScore>& scores) {
  std::string text = "feature,f_value\n";
  for (const auto& s : scores) text += s.feature_name + "," + format_double(s.f_value) + "\n";
  write_text(csv, text);
}

std::vector<FeatureScore> read_scores(const fs::path& csv) {
  CsvReader reader(csv);
  const auto cf = reader.column("feature");
  const auto cv = reader.column("f_value");
  std::vector<FeatureScore> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const double v = reader.number(f[cv], cv);
    if (!(v >= 0.0)) throw SchemaError(csv.string(), reader.row_number(), "f_value", "must be non-negative");
    out.push_back({f[cf], v});
  }
  return out;
}

void write_time_course(const fs::path& csv, const TimeCourse& tc) {
  std::string text = "time_sec,mean,std_err,n\n";
  for (std::size_t i = 0; i < tc.times_sec.size(); ++i)
    text += format_double(tc.times_sec[i]) + "," + format_double(tc.mean[i]) + "," + format_double(tc.std_err[i]) +
            "," + std::to_string(tc.n_subjects[i]) + "\n";
  write_text(csv, text);
}

TimeCourse read_time_course(const fs::path& csv) {
  CsvReader reader(csv);
  const auto ct = reader.column("time_sec");
  const auto cm = reader.column("mean");
  const auto cs = reader.column("std_err");
  const auto cn = reader.column("n");
  TimeCourse tc;
  std::vector<std::string> f;
  while (reader.next(f)) {
    tc.times_sec.push_back(reader.number(f[ct], ct));
    tc.mean.push_back(reader.number(f[cm], cm));
    tc.std_err.push_back(reader.number(f[cs], cs));
    const long n = reader.integer(f[cn], cn);
    if (n < 0) throw SchemaError(csv.string(), reader.row_number(), "n", "must be >= 0");
    tc.n_subjects.push_back(static_cast<std::size_t>(n));
  }
  return tc;
}

std::string time_course_svg(const TimeCourse& tc, const std::string& title) {
  const double width = 640, height = 360, margin = 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < tc.mean.size(); ++i) {
    if (std::isnan(tc.mean[i])) continue;
    const double se = std::isnan(tc.std_err[i]) ? 0.0 : tc.std_err[i];
    lo = std::min(lo, tc.mean[i] - se);
    hi = std::max(hi, tc.mean[i] + se);
  }
  if (!(hi > lo)) {
    lo = std::isfinite(lo) ? lo - 1.0 : -1.0;
    hi = lo + 2.0;
  }
  const double t0 = tc.times_sec.empty() ? 0.0 : tc.times_sec.front();
  const double t1 = tc.times_sec.empty() ? 1.0 : tc.times_sec.back();
  auto px = [&](double t) { return margin + (t1 > t0 ? (t - t0) / (t1 - t0) : 0.5) * (width - 2 * margin); };
  auto py = [&](double v) { return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin); };

  std::string band, upper, lower, line;
  for (std::size_t i = 0; i < tc.times_sec.size(); ++i) {
    if (std::isnan(tc.mean[i])) continue;
    const double se = std::isnan(tc.std_err[i]) ? 0.0 : tc.std_err[i];
    line += format_double(px(tc.times_sec[i])) + "," + format_double(py(tc.mean[i])) + " ";
    upper += format_double(px(tc.times_sec[i])) + "," + format_double(py(tc.mean[i] + se)) + " ";
    lower.insert(0, format_double(px(tc.times_sec[i])) + "," + format_double(py(tc.mean[i] - se)) + " ");
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
      << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
      << "<polygon points=\"" << upper << lower << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n"
      << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n";
  if (t0 <= 0.0 && t1 >= 0.0)
    svg << "<line x1=\"" << px(0.0) << "\" y1=\"" << margin << "\" x2=\"" << px(0.0) << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << height - 15 << "\" font-family=\"sans-serif\" font-size=\"11\">t = "
      << format_double(t0) << " .. " << format_double(t1) << " s; y = " << format_double(lo) << " .. "
      << format_double(hi) << "</text>\n</svg>\n";
  return svg.str();
}

}  // namespace ewb
