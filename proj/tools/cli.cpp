#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewb/config.hpp"
#include "ewb/dynamics.hpp"
#include "ewb/errors.hpp"
#include "ewb/eval.hpp"
#include "ewb/features.hpp"
#include "ewb/formats.hpp"
#include "ewb/hypothesis.hpp"
#include "ewb/ranking.hpp"
#include "ewb/signal.hpp"
#include "ewb/signature.hpp"
#include "ewb/synth.hpp"

namespace ewb::cli {
namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string config;
  std::vector<std::string> in;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ng;
  std::string feature_space = "all";
  std::optional<std::string> cv;
  std::optional<double> top_percent;
  std::string events;
  std::string preset;
  std::string scores;
  std::string signature;
  std::string plot;
  std::string event_class = "all";
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

PipelineConfig load_config(const Options& o) {
  return o.config.empty() ? PipelineConfig{} : PipelineConfig::load(o.config);
}

const std::string& single_input(const Options& o) {
  if (o.in.size() != 1) throw UsageError("expected exactly one --in");
  return o.in.front();
}

void require_out(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
}

// A dataset directory holds recording.csv (+ .json sidecar) and events.csv.
bool is_dataset_dir(const fs::path& p) { return fs::is_directory(p); }

struct RecordingInput {
  Recording recording;
  std::vector<EventMarker> events;
};

RecordingInput load_recording_input(const fs::path& in, const std::string& events) {
  if (is_dataset_dir(in)) {
    const fs::path ev = events.empty() ? in / "events.csv" : fs::path(events);
    return {read_recording(in / "recording.csv"), read_events(ev)};
  }
  if (events.empty()) throw UsageError("--events is required when --in is a recording file");
  return {read_recording(in), read_events(events)};
}

std::vector<Epoch> cut_epochs(const PipelineConfig& cfg, const RecordingInput& input) {
  return extract_epochs(input.recording, input.events, {cfg.epoch.start_sec, cfg.epoch.end_sec});
}

LabeledFeatureSet load_features(const std::string& path) { return read_features(path).to_labeled_set(); }

void print_summary(std::ostream& out, const std::string& line) { out << line << "\n"; }

// ---- subcommands -------------------------------------------------------

int cmd_synth(const Options& o, std::ostream& out) {
  require_out(o);
  PipelineConfig cfg = load_config(o);
  SynthConfig sc = cfg.synth;
  if (!o.preset.empty()) {
    const std::uint64_t seed = sc.seed;
    if (o.preset == "default")
      sc = default_synth_config();
    else if (o.preset == "null")
      sc = null_synth_config();
    else if (o.preset == "broad")
      sc = broad_synth_config();
    else if (o.preset == "dynamics")
      sc = dynamics_synth_config();
    else
      throw UsageError("--preset must be default, null, broad or dynamics");
    sc.seed = seed;
  }
  if (o.seed) sc.seed = *o.seed;
  const auto ds = generate(sc);
  const fs::path dir(o.out);
  write_recording(dir / "recording.csv", ds.recording);
  write_events(dir / "events.csv", ds.events);
  write_text(dir / "manifest.json", ds.manifest.to_json());
  print_summary(out, "wrote " + std::to_string(ds.recording.n_samples()) + " samples, " +
                         std::to_string(ds.events.size()) + " events to " + dir.string());
  return 0;
}

int cmd_preprocess(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = load_config(o);
  const fs::path in(single_input(o));
  Recording rec = read_recording(is_dataset_dir(in) ? in / "recording.csv" : in);
  rec = bandpass_filter(rec, cfg.preprocess.bandpass_low_hz, cfg.preprocess.bandpass_high_hz);
  if (cfg.preprocess.reference) rec = rereference(rec, *cfg.preprocess.reference);
  if (cfg.preprocess.target_rate_hz) rec = downsample(rec, *cfg.preprocess.target_rate_hz);
  write_recording(o.out, rec);
  print_summary(out, "wrote " + std::to_string(rec.n_samples()) + " samples to " + o.out);
  return 0;
}

int cmd_epoch(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = load_config(o);
  const auto input = load_recording_input(single_input(o), o.events);
  auto epochs = cut_epochs(cfg, input);
  for (auto& e : epochs) e = select_channels(e, cfg.channels);
  write_epochs(o.out, epochs);
  print_summary(out, "wrote " + std::to_string(epochs.size()) + " epochs to " + o.out);
  return 0;
}

int cmd_features(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = load_config(o);
  const fs::path in(single_input(o));
  std::vector<Epoch> epochs;
  if (is_dataset_dir(in) || !o.events.empty())
    epochs = cut_epochs(cfg, load_recording_input(in, o.events));
  else
    epochs = read_epochs(in);
  for (auto& e : epochs) e = select_channels(e, cfg.channels);
  const auto fv = extract_all(epochs, cfg.features);
  write_features(o.out, make_feature_table(fv, epochs));
  std::size_t floored = 0, degenerate = 0;
  for (const auto& f : fv) {
    floored += f.floored_band_powers;
    degenerate += f.degenerate_mi;
  }
  print_summary(out, "wrote " + std::to_string(fv.size()) + " feature vectors to " + o.out);
  if (floored) print_summary(out, "warning: " + std::to_string(floored) + " band powers hit the log floor");
  if (degenerate) print_summary(out, "warning: " + std::to_string(degenerate) + " MI evaluations on constant series");
  return 0;
}

PipelineConfig apply_eval_flags(PipelineConfig cfg, const Options& o) {
  if (o.seed) cfg.evaluation.seed = *o.seed;
  if (o.cv) cfg.evaluation.cv = parse_cv_scheme(*o.cv);
  if (o.top_percent) cfg.evaluation.top_percent = *o.top_percent;
  cfg.validate();
  return cfg;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = apply_eval_flags(load_config(o), o);
  const auto space = parse_feature_space(o.feature_space);
  const auto set = load_features(single_input(o));
  EvalOptions eo;
  eo.svm = cfg.evaluation.svm;
  eo.top_percent = cfg.evaluation.top_percent;

  if (o.ng) {
    if (*o.ng < 1) throw UsageError("--ng must be at least 1");
    const auto r = evaluate(set, cfg.splitter(), *o.ng, space, eo);
    write_text(o.out, r.to_json());
    std::ostringstream s;
    s << "n_g " << *o.ng << " " << to_string(space) << ": mean balanced accuracy " << format_double(r.mean)
      << ", pooled " << format_double(r.pooled);
    print_summary(out, s.str());
    return 0;
  }
  json sweep;
  sweep["format"] = "ewb-eval-sweep";
  sweep["version"] = 1;
  sweep["results"] = json::array();
  for (std::size_t g : cfg.evaluation.ng_sweep) {
    const auto r = evaluate(set, cfg.splitter(), g, space, eo);
    sweep["results"].push_back(json::parse(r.to_json()));
    print_summary(out, "n_g " + std::to_string(g) + " " + to_string(space) + ": mean balanced accuracy " +
                           format_double(r.mean));
  }
  write_text(o.out, sweep.dump(2) + "\n");
  return 0;
}

std::vector<FeatureScore> score_file(const std::string& path, const Options& o) {
  auto set = load_features(path);
  set = set.select_columns(feature_space_columns(set.feature_names, parse_feature_space(o.feature_space)));
  if (o.ng && *o.ng > 1) set = group_samples(set, *o.ng);
  return anova_f_scores(set.x, set.y, set.feature_names);
}

int cmd_rank(const Options& o, std::ostream& out) {
  require_out(o);
  if (o.in.empty()) throw UsageError("--in is required");
  std::vector<std::vector<FeatureScore>> per_file;
  for (const auto& path : o.in) per_file.push_back(score_file(path, o));
  const auto scores = average_scores(per_file);
  write_scores(o.out, scores);
  print_summary(out, "wrote " + std::to_string(scores.size()) + " feature scores to " + o.out);
  return 0;
}

int cmd_signature_build(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = load_config(o);
  const auto set = load_features(single_input(o));
  const auto scores = o.scores.empty() ? anova_f_scores(set.x, set.y, set.feature_names) : read_scores(o.scores);
  auto def = build_signature(set.x, set.y, set.feature_names, scores, cfg.statistics.signature_k);
  write_text(o.out, def.to_json());
  for (const auto& w : def.warnings) print_summary(out, "warning: " + w);
  print_summary(out, "wrote signature with " + std::to_string(def.entries.size()) + " features to " + o.out);
  return 0;
}

int cmd_signature_apply(const Options& o, std::ostream& out) {
  require_out(o);
  if (o.signature.empty()) throw UsageError("--signature is required");
  const auto table = read_features(single_input(o));
  const auto def = SignatureDef::from_json(read_text(o.signature));
  std::string text = "epoch_index,class_label,block_id,value\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    text += std::to_string(table.epoch_index[r]) + "," + std::to_string(table.class_labels[r]) + "," +
            std::to_string(table.block_ids[r]) + "," + format_double(signature_value(def, table.names, table.rows[r])) +
            "\n";
  write_text(o.out, text);
  print_summary(out, "wrote " + std::to_string(table.rows.size()) + " signature values to " + o.out);
  return 0;
}

int cmd_signature_literature(const Options& o, std::ostream& out) {
  require_out(o);
  write_text(o.out, literature_signature_def().to_json());
  print_summary(out, "wrote literature signature to " + o.out);
  return 0;
}

// Paired samples from a two-column CSV (a,b) or from the fold scores of two
// evaluation results, keeping folds that are defined in both.
std::pair<std::vector<double>, std::vector<double>> load_pairs(const Options& o) {
  std::vector<double> a, b;
  if (o.in.size() == 1) {
    const auto text = read_text(o.in.front());
    std::istringstream ss(text);
    std::string line;
    std::getline(ss, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "a,b") throw SchemaError(o.in.front(), 1, "a", "paired CSV header must be a,b");
    std::size_t row = 1;
    while (std::getline(ss, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw SchemaError(o.in.front(), row, "b", "missing field");
      auto parse = [&](const std::string& f, const char* col) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(f, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != f.size()) throw SchemaError(o.in.front(), row, col, "'" + f + "' is not a number");
        return v;
      };
      a.push_back(parse(line.substr(0, comma), "a"));
      b.push_back(parse(line.substr(comma + 1), "b"));
    }
  } else if (o.in.size() == 2) {
    const auto ra = EvalResult::from_json(read_text(o.in[0]));
    const auto rb = EvalResult::from_json(read_text(o.in[1]));
    if (ra.fold_scores.size() != rb.fold_scores.size())
      throw ParameterError("stats: result files have different fold counts");
    for (std::size_t i = 0; i < ra.fold_scores.size(); ++i)
      if (ra.fold_scores[i] && rb.fold_scores[i]) {
        a.push_back(*ra.fold_scores[i]);
        b.push_back(*rb.fold_scores[i]);
      }
  } else {
    throw UsageError("stats: pass one paired CSV or two evaluation result files with --in");
  }
  return {a, b};
}

int cmd_stats_wilcoxon(const Options& o, std::ostream& out) {
  require_out(o);
  const auto [a, b] = load_pairs(o);
  const auto r = wilcoxon_signed_rank(a, b);
  write_text(o.out, r.to_json());
  print_summary(out, "wilcoxon: statistic " + format_double(r.statistic) + ", p " + format_double(r.p_value));
  return 0;
}

int cmd_stats_bootstrap(const Options& o, std::ostream& out) {
  require_out(o);
  const PipelineConfig cfg = load_config(o);
  const auto [a, b] = load_pairs(o);
  const auto r = paired_bootstrap_f_test(a, b, cfg.statistics.resamples, o.seed ? *o.seed : cfg.statistics.seed);
  write_text(o.out, r.to_json());
  print_summary(out, "bootstrap-f: statistic " + format_double(r.statistic) + ", p " + format_double(r.p_value));
  return 0;
}

int cmd_stats_bh(const Options& o, std::ostream& out) {
  require_out(o);
  if (o.in.empty()) throw UsageError("--in is required");
  std::vector<TestResult> tests;
  for (const auto& path : o.in) tests.push_back(TestResult::from_json(read_text(path)));
  std::vector<double> p;
  for (const auto& t : tests) p.push_back(t.p_value);
  const auto adj = benjamini_hochberg(p);
  json arr = json::array();
  for (std::size_t i = 0; i < tests.size(); ++i) {
    tests[i].adjusted_p = adj[i];
    json entry = json::parse(tests[i].to_json());
    entry["source"] = o.in[i];
    arr.push_back(std::move(entry));
  }
  json doc;
  doc["format"] = "ewb-bh";
  doc["version"] = 1;
  doc["tests"] = std::move(arr);
  write_text(o.out, doc.dump(2) + "\n");
  print_summary(out, "adjusted " + std::to_string(tests.size()) + " p-values");
  return 0;
}

int cmd_dynamics(const Options& o, std::ostream& out) {
  require_out(o);
  if (o.in.empty()) throw UsageError("--in is required");
  const PipelineConfig cfg = load_config(o);
  const SignatureDef def = o.signature.empty() ? literature_signature_def() : SignatureDef::from_json(read_text(o.signature));
  std::optional<ClassLabel> keep;
  if (o.event_class == "high")
    keep = ClassLabel::high;
  else if (o.event_class == "low")
    keep = ClassLabel::low;
  else if (o.event_class != "all")
    throw UsageError("--class must be all, high or low");

  std::vector<SubjectSeries> series;
  for (const auto& path : o.in) {
    auto input = load_recording_input(path, o.in.size() == 1 ? o.events : std::string());
    if (keep) std::erase_if(input.events, [&](const EventMarker& e) { return e.class_label != *keep; });
    series.push_back(signature_time_course(input.recording, input.events, def, cfg.time_course_options()));
  }
  const auto tc = aggregate_subjects(series);
  write_time_course(o.out, tc);
  if (!o.plot.empty()) write_text(o.plot, time_course_svg(tc, def.name + " time course"));
  print_summary(out, "wrote " + std::to_string(tc.times_sec.size()) + " time steps to " + o.out);
  return 0;
}

json error_json(const std::string& kind, const std::string& message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG memory-workload analysis workbench"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "pipeline config JSON")->check(CLI::ExistingFile);
    sub->add_option("--in", o.in, "input file or dataset directory (repeatable where noted)");
    sub->add_option("--out", o.out, "output path");
  };
  auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "override the configured seed"); };

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  common(synth);
  seed_opt(synth);
  synth->add_option("--preset", o.preset, "default, null, broad or dynamics (otherwise the config's synth section)");

  auto* preprocess = app.add_subcommand("preprocess", "band-pass, re-reference and downsample a recording");
  common(preprocess);

  auto* epoch = app.add_subcommand("epoch", "cut event-locked epochs");
  common(epoch);
  epoch->add_option("--events", o.events, "events CSV (default <in>/events.csv)");

  auto* features = app.add_subcommand("features", "extract the feature matrix");
  common(features);
  features->add_option("--events", o.events, "events CSV when --in is a recording");

  auto* evaluate = app.add_subcommand("evaluate", "run the grouped classification protocol");
  common(evaluate);
  seed_opt(evaluate);
  evaluate->add_option("--ng", o.ng, "group size (default: the configured sweep)");
  evaluate->add_option("--feature-space", o.feature_space, "bp, mi, coh or all")
      ->check(CLI::IsMember({"bp", "mi", "coh", "all"}));
  evaluate->add_option("--cv", o.cv, "cross-block or kfold")->check(CLI::IsMember({"cross-block", "kfold"}));
  evaluate->add_option("--top-percent", o.top_percent, "keep the top percent of features per fold");

  auto* rank = app.add_subcommand("rank", "ANOVA F scores, averaged over --in files");
  common(rank);
  rank->add_option("--ng", o.ng, "group size applied before scoring");
  rank->add_option("--feature-space", o.feature_space, "bp, mi, coh or all")
      ->check(CLI::IsMember({"bp", "mi", "coh", "all"}));

  auto* signature = app.add_subcommand("signature", "build, apply or emit signatures");
  signature->require_subcommand(1);
  auto* sig_build = signature->add_subcommand("build", "build a signature from features and scores");
  common(sig_build);
  sig_build->add_option("--scores", o.scores, "feature score CSV (default: score the input)");
  auto* sig_apply = signature->add_subcommand("apply", "evaluate a signature on every feature row");
  common(sig_apply);
  sig_apply->add_option("--signature", o.signature, "signature JSON")->required();
  auto* sig_lit = signature->add_subcommand("literature", "write the Fz delta + theta - alpha signature");
  common(sig_lit);

  auto* stats = app.add_subcommand("stats", "paired tests and FDR adjustment");
  stats->require_subcommand(1);
  auto* st_w = stats->add_subcommand("wilcoxon", "Wilcoxon signed-rank test");
  common(st_w);
  auto* st_b = stats->add_subcommand("bootstrap-f", "sign-flip resampling F test");
  common(st_b);
  seed_opt(st_b);
  auto* st_bh = stats->add_subcommand("bh", "Benjamini-Hochberg adjustment over test result files");
  common(st_bh);

  auto* dynamics = app.add_subcommand("dynamics", "signature time course around events");
  common(dynamics);
  dynamics->add_option("--events", o.events, "events CSV when --in is a recording");
  dynamics->add_option("--signature", o.signature, "signature JSON (default: literature signature)");
  dynamics->add_option("--plot", o.plot, "also write an SVG plot");
  dynamics->add_option("--class", o.event_class, "all, high or low events")->check(CLI::IsMember({"all", "high", "low"}));

  std::vector<std::string> argv_store{"ewb"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests surface as CallForHelp too; anything else is a usage error.
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (preprocess->parsed()) return cmd_preprocess(o, out);
    if (epoch->parsed()) return cmd_epoch(o, out);
    if (features->parsed()) return cmd_features(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (rank->parsed()) return cmd_rank(o, out);
    if (sig_build->parsed()) return cmd_signature_build(o, out);
    if (sig_apply->parsed()) return cmd_signature_apply(o, out);
    if (sig_lit->parsed()) return cmd_signature_literature(o, out);
    if (st_w->parsed()) return cmd_stats_wilcoxon(o, out);
    if (st_b->parsed()) return cmd_stats_bootstrap(o, out);
    if (st_bh->parsed()) return cmd_stats_bh(o, out);
    if (dynamics->parsed()) return cmd_dynamics(o, out);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    auto j = error_json(e.kind(), e.what());
    j["row"] = e.row();
    j["column"] = e.column();
    err << j.dump() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    auto j = error_json(e.kind(), e.what());
    j["keys"] = e.keys();
    err << j.dump() << "\n";
    return 1;
  } catch (const OutOfBoundsError& e) {
    auto j = error_json(e.kind(), e.what());
    j["events"] = e.events();
    err << j.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_json("internal", e.what()).dump() << "\n";
    return 1;
  }
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ewb::cli
