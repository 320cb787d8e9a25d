#pragma once

// End-to-end pipeline: load a dataset, mine rules per training fold, score
// with the baseline classifier, correct uncertain scores, evaluate both
// variants, and write every artifact needed to reproduce or audit the run.
//
// All randomness flows from the configured seed (run r uses seed + r), and
// numbers are serialized in shortest round-trip form, so repeating a run
// into a fresh directory reproduces every artifact byte for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flma/arff.hpp"
#include "flma/correction.hpp"
#include "flma/csv.hpp"
#include "flma/dataset.hpp"
#include "flma/detail/text.hpp"
#include "flma/errors.hpp"
#include "flma/metrics.hpp"
#include "flma/mlknn.hpp"
#include "flma/rules.hpp"

namespace flma {

struct RunConfig {
  std::string data_path;
  std::string label_xml_path;   // required for ARFF input
  int csv_label_count = 0;      // required for CSV input

  std::string classifier = "mlknn";  // "mlknn" or "external"
  int knn_k = 10;
  double knn_smoothing = 1.0;
  std::string external_scores_path;  // full N x C matrix for "external"
  bool scores_have_header = true;

  MiningParams mining;

  // When both are set, they replace threshold fitting on training scores.
  std::optional<double> threshold_lower;
  std::optional<double> threshold_upper;

  int folds = 5;
  int runs = 1;
  std::uint64_t seed = 42;
  bool write_trace = false;

  std::string out_dir;
};

inline void validate_run_config(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw std::invalid_argument("no dataset path given");
  if (cfg.classifier != "mlknn" && cfg.classifier != "external")
    throw std::invalid_argument("classifier must be 'mlknn' or 'external'");
  if (cfg.classifier == "external" && cfg.external_scores_path.empty())
    throw std::invalid_argument("external classifier requires a score file");
  if (cfg.folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (cfg.threshold_lower.has_value() != cfg.threshold_upper.has_value())
    throw std::invalid_argument("set both certainty thresholds or neither");
  if (cfg.threshold_lower) make_thresholds(*cfg.threshold_lower, *cfg.threshold_upper);
  cfg.mining.validate();
}

inline MultiLabelDataset load_dataset(const RunConfig& cfg) {
  const std::string lowered = detail::to_lower(cfg.data_path);
  if (lowered.size() >= 5 && lowered.substr(lowered.size() - 5) == ".arff") {
    if (cfg.label_xml_path.empty())
      throw std::invalid_argument("ARFF input requires a label specification XML (--xml)");
    return load_mulan_arff(cfg.data_path, cfg.label_xml_path);
  }
  if (cfg.csv_label_count < 1)
    throw std::invalid_argument("CSV input requires the trailing label column count (--label-count)");
  return load_csv(cfg.data_path, cfg.csv_label_count);
}

// Flat key=value form of everything that affects results. The output
// directory is deliberately excluded so a rerun into a fresh directory can
// reuse the file verbatim; keys match the CLI flag names.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto put = [&](const char* key, const std::string& value) {
    if (!value.empty()) os << key << '=' << value << '\n';
  };
  put("data", cfg.data_path);
  put("xml", cfg.label_xml_path);
  if (cfg.csv_label_count > 0) os << "label-count=" << cfg.csv_label_count << '\n';
  put("classifier", cfg.classifier);
  os << "k=" << cfg.knn_k << '\n';
  os << "smoothing=" << detail::format_double(cfg.knn_smoothing) << '\n';
  put("scores", cfg.external_scores_path);
  os << "no-header=" << (cfg.scores_have_header ? "false" : "true") << '\n';
  os << "min-sup-cp=" << detail::format_double(cfg.mining.min_sup_cp) << '\n';
  os << "min-conf-cp=" << detail::format_double(cfg.mining.min_conf_cp) << '\n';
  os << "min-sup-ca=" << detail::format_double(cfg.mining.min_sup_ca) << '\n';
  os << "min-conf-ca=" << detail::format_double(cfg.mining.min_conf_ca) << '\n';
  os << "max-size=" << cfg.mining.max_labelset_size << '\n';
  os << "frequency-filter=" << (cfg.mining.use_frequency_filter ? "true" : "false") << '\n';
  if (cfg.threshold_lower) os << "thr-lower=" << detail::format_double(*cfg.threshold_lower) << '\n';
  if (cfg.threshold_upper) os << "thr-upper=" << detail::format_double(*cfg.threshold_upper) << '\n';
  os << "folds=" << cfg.folds << '\n';
  os << "runs=" << cfg.runs << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "trace=" << (cfg.write_trace ? "true" : "false") << '\n';
  return os.str();
}

struct FoldDiagnostics {
  CertaintyThresholds thresholds;
  std::size_t cp_rule_count = 0;
  std::size_t ca_rule_count = 0;
  std::size_t cleaned_rule_count = 0;
  std::size_t corrections = 0;
  std::size_t clamped_high = 0;  // CP shifts cut off at 1
  std::size_t clamped_low = 0;   // CA shifts cut off at 0
};

struct FoldOutcome {
  int run = 0;
  FoldSplit split;
  FoldDiagnostics diagnostics;
  EvaluationReport baseline;
  EvaluationReport corrected;
  std::vector<AssociationRule> rules;
  CorrectionTrace trace;
};

struct RunSummary {
  EvaluationReport baseline;
  EvaluationReport corrected;
  std::vector<FoldOutcome> folds;
  std::size_t instances = 0;
  std::size_t labels = 0;
  std::size_t features = 0;
};

namespace detail {

inline ScoreMatrix select_rows(const ScoreMatrix& m, const std::vector<int>& rows) {
  ScoreMatrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out(i, c) = m(static_cast<std::size_t>(rows[i]), c);
  return out;
}

}  // namespace detail

inline FoldOutcome compute_fold(const MultiLabelDataset& ds, const RunConfig& cfg, int run_index,
                                const FoldSplit& split, const ScoreMatrix* external_scores) {
  FoldOutcome out;
  out.run = run_index;
  out.split = split;

  const MultiLabelDataset train = ds.subset(split.train_indices);
  const MultiLabelDataset test = ds.subset(split.test_indices);

  const MinedRules mined = mine_cp_ca(train, cfg.mining);
  out.rules = clean_rules(mined.cp, mined.ca);

  ScoreMatrix train_scores, test_scores;
  if (external_scores) {
    train_scores = detail::select_rows(*external_scores, split.train_indices);
    test_scores = detail::select_rows(*external_scores, split.test_indices);
  } else {
    const MlknnModel model = MlknnModel::fit(train, cfg.knn_k, cfg.knn_smoothing);
    train_scores = model.predict_scores(train.features());
    test_scores = model.predict_scores(test.features());
  }

  const CertaintyThresholds thresholds =
      cfg.threshold_lower ? make_thresholds(*cfg.threshold_lower, *cfg.threshold_upper)
                          : fit_thresholds(train_scores);
  const CertaintyPartition tags = partition(test_scores, thresholds);
  CorrectionResult corr = apply_rules(test_scores, tags, out.rules, thresholds);

  out.baseline = evaluate(harden(test_scores), test_scores, test.labels());
  out.corrected = evaluate(harden(corr.scores), corr.scores, test.labels());

  auto& d = out.diagnostics;
  d.thresholds = thresholds;
  d.cp_rule_count = mined.cp.size();
  d.ca_rule_count = mined.ca.size();
  d.cleaned_rule_count = out.rules.size();
  d.corrections = corr.trace.entries.size();
  for (const auto& e : corr.trace.entries) {
    if (e.polarity == RulePolarity::CP && e.before + e.delta > 1.0) ++d.clamped_high;
    if (e.polarity == RulePolarity::CA && e.before - e.delta < 0.0) ++d.clamped_low;
  }
  out.trace = std::move(corr.trace);
  return out;
}

// Cross-validated comparison of raw and corrected predictions. Folds are
// computed concurrently; results are collected in (run, fold) order so
// downstream output is deterministic.
inline RunSummary run_cross_validation(const MultiLabelDataset& ds, const RunConfig& cfg) {
  validate_run_config(cfg);

  std::optional<ScoreMatrix> external;
  if (cfg.classifier == "external") {
    external = load_external_scores(cfg.external_scores_path, ds.label_count(),
                                    cfg.scores_have_header);
    if (external->rows() != ds.instance_count())
      throw std::invalid_argument("external score rows must cover every dataset instance");
  }
  const ScoreMatrix* external_ptr = external ? &*external : nullptr;

  std::vector<std::future<FoldOutcome>> futures;
  for (int r = 0; r < cfg.runs; ++r) {
    const auto splits = kfold_split(ds, cfg.folds, cfg.seed + static_cast<std::uint64_t>(r));
    for (const auto& split : splits)
      futures.push_back(std::async(std::launch::async,
                                   [&ds, &cfg, r, split, external_ptr]() {
                                     return compute_fold(ds, cfg, r, split, external_ptr);
                                   }));
  }

  RunSummary summary;
  summary.instances = ds.instance_count();
  summary.labels = ds.label_count();
  summary.features = ds.feature_count();
  std::vector<EvaluationReport> baseline_reports, corrected_reports;
  for (auto& f : futures) {
    summary.folds.push_back(f.get());
    baseline_reports.push_back(summary.folds.back().baseline);
    corrected_reports.push_back(summary.folds.back().corrected);
  }
  summary.baseline = aggregate(baseline_reports);
  summary.corrected = aggregate(corrected_reports);
  return summary;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json j;
  const auto values = metric_values(r);
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) j[kMetricNames[i]] = values[i];
  return j;
}

inline nlohmann::json to_json(const FoldDiagnostics& d) {
  return {{"threshold_lower", d.thresholds.lower},
          {"threshold_upper", d.thresholds.upper},
          {"threshold_fallback", d.thresholds.used_fallback},
          {"cp_rules", d.cp_rule_count},
          {"ca_rules", d.ca_rule_count},
          {"cleaned_rules", d.cleaned_rule_count},
          {"corrections", d.corrections},
          {"clamped_high", d.clamped_high},
          {"clamped_low", d.clamped_low}};
}

// Two-row comparison: the baseline classifier and the corrected variant.
inline std::string comparison_csv(const EvaluationReport& baseline,
                                  const EvaluationReport& corrected) {
  std::ostringstream os;
  os << "method";
  for (const char* name : kMetricNames) os << ',' << name;
  os << '\n';
  auto row = [&](const char* method, const EvaluationReport& r) {
    os << method;
    for (double v : metric_values(r)) os << ',' << detail::format_double(v);
    os << '\n';
  };
  row("baseline", baseline);
  row("flma", corrected);
  return os.str();
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << content;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// Full protocol with artifacts. Layout under out_dir:
//   config.ini, aggregate.json, comparison.csv
//   run_<r>/fold_<f>/{rules.tsv, report.json, report.csv[, trace.tsv]}
inline RunSummary cmd_run(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("run requires --out-dir");
  const MultiLabelDataset ds = load_dataset(cfg);
  RunSummary summary = run_cross_validation(ds, cfg);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  detail::write_text_file(fs::path(cfg.out_dir) / "config.ini", serialize_config(cfg));

  nlohmann::json diag_folds = nlohmann::json::array();
  for (const auto& fo : summary.folds) {
    const fs::path dir = fs::path(cfg.out_dir) / ("run_" + std::to_string(fo.run)) /
                         ("fold_" + std::to_string(fo.split.fold_id));
    fs::create_directories(dir);
    write_rules_file((dir / "rules.tsv").string(), fo.rules, ds.label_names());

    nlohmann::json report;
    report["run"] = fo.run;
    report["fold"] = fo.split.fold_id;
    report["baseline"] = to_json(fo.baseline);
    report["flma"] = to_json(fo.corrected);
    report["diagnostics"] = to_json(fo.diagnostics);
    detail::write_json_file(dir / "report.json", report);
    detail::write_text_file(dir / "report.csv", comparison_csv(fo.baseline, fo.corrected));
    if (cfg.write_trace)
      write_trace_file((dir / "trace.tsv").string(), fo.trace, fo.rules, ds.label_names());

    nlohmann::json df = to_json(fo.diagnostics);
    df["run"] = fo.run;
    df["fold"] = fo.split.fold_id;
    diag_folds.push_back(std::move(df));
  }

  nlohmann::json agg;
  agg["baseline"] = to_json(summary.baseline);
  agg["flma"] = to_json(summary.corrected);
  agg["dataset"] = {{"instances", summary.instances},
                    {"labels", summary.labels},
                    {"features", summary.features}};
  agg["folds"] = cfg.folds;
  agg["runs"] = cfg.runs;
  agg["seed"] = cfg.seed;
  agg["diagnostics"] = std::move(diag_folds);
  detail::write_json_file(fs::path(cfg.out_dir) / "aggregate.json", agg);
  detail::write_text_file(fs::path(cfg.out_dir) / "comparison.csv",
                          comparison_csv(summary.baseline, summary.corrected));
  return summary;
}

struct MineOutcome {
  std::vector<AssociationRule> rules;  // cleaned, canonical order
  std::size_t cp_rule_count = 0;
  std::size_t ca_rule_count = 0;
  std::vector<std::string> label_names;
};

// Mines the whole dataset and, when an output directory is given, writes
// rules.tsv, summary.json and config.ini.
inline MineOutcome cmd_mine(const RunConfig& cfg) {
  cfg.mining.validate();
  const MultiLabelDataset ds = load_dataset(cfg);
  const MinedRules mined = mine_cp_ca(ds, cfg.mining);

  MineOutcome out;
  out.rules = clean_rules(mined.cp, mined.ca);
  out.cp_rule_count = mined.cp.size();
  out.ca_rule_count = mined.ca.size();
  out.label_names = ds.label_names();

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    write_rules_file((fs::path(cfg.out_dir) / "rules.tsv").string(), out.rules, ds.label_names());
    nlohmann::json j;
    j["cp_rules"] = out.cp_rule_count;
    j["ca_rules"] = out.ca_rule_count;
    j["cleaned_rules"] = out.rules.size();
    j["dataset"] = {{"instances", ds.instance_count()},
                    {"labels", ds.label_count()},
                    {"features", ds.feature_count()}};
    detail::write_json_file(fs::path(cfg.out_dir) / "summary.json", j);
    detail::write_text_file(fs::path(cfg.out_dir) / "config.ini", serialize_config(cfg));
  }
  return out;
}

struct CorrectOptions {
  std::string scores_path;
  std::string rules_path;
  bool scores_have_header = true;
  std::vector<std::string> label_names;  // overrides/replaces the header
  std::optional<double> threshold_lower;
  std::optional<double> threshold_upper;
  bool write_trace = false;
  std::string out_dir;
};

struct CorrectOutcome {
  std::vector<std::string> label_names;
  CertaintyThresholds thresholds;
  ScoreMatrix corrected;
  LabelMatrix hard_labels;
  std::vector<AssociationRule> rules;
  CorrectionTrace trace;
};

// Applies a rule file to a standalone score matrix. Thresholds are fitted on
// the given scores unless fixed ones are supplied.
inline CorrectOutcome cmd_correct(const CorrectOptions& opt) {
  ScoreCsv parsed = read_score_csv(opt.scores_path, opt.scores_have_header);
  CorrectOutcome out;
  out.label_names = opt.label_names.empty() ? parsed.label_names : opt.label_names;
  if (out.label_names.empty())
    throw std::invalid_argument("score file has no header; pass the label names (--labels)");
  if (out.label_names.size() != parsed.scores.cols())
    throw LabelMismatchError("expected " + std::to_string(out.label_names.size()) +
                             " score columns, got " + std::to_string(parsed.scores.cols()));
  for (double v : parsed.scores.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw ParseError(opt.scores_path + ": score outside [0, 1]: " + detail::format_double(v));

  const auto imported = read_rules_file(opt.rules_path, out.label_names);
  std::vector<AssociationRule> cp, ca;
  for (const auto& r : imported)
    (r.polarity == RulePolarity::CP ? cp : ca).push_back(r);
  out.rules = clean_rules(cp, ca);

  if (opt.threshold_lower.has_value() != opt.threshold_upper.has_value())
    throw std::invalid_argument("set both certainty thresholds or neither");
  out.thresholds = opt.threshold_lower
                       ? make_thresholds(*opt.threshold_lower, *opt.threshold_upper)
                       : fit_thresholds(parsed.scores);

  const CertaintyPartition tags = partition(parsed.scores, out.thresholds);
  CorrectionResult corr = apply_rules(parsed.scores, tags, out.rules, out.thresholds);
  out.corrected = std::move(corr.scores);
  out.trace = std::move(corr.trace);
  out.hard_labels = harden(out.corrected);

  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    write_score_csv_file((fs::path(opt.out_dir) / "corrected.csv").string(), out.corrected,
                         out.label_names);
    write_label_csv_file((fs::path(opt.out_dir) / "labels.csv").string(), out.hard_labels,
                         out.label_names);
    nlohmann::json j;
    j["threshold_lower"] = out.thresholds.lower;
    j["threshold_upper"] = out.thresholds.upper;
    j["threshold_fallback"] = out.thresholds.used_fallback;
    j["rules"] = out.rules.size();
    j["corrections"] = out.trace.entries.size();
    detail::write_json_file(fs::path(opt.out_dir) / "summary.json", j);
    if (opt.write_trace)
      write_trace_file((fs::path(opt.out_dir) / "trace.tsv").string(), out.trace, out.rules,
                       out.label_names);
  }
  return out;
}

struct EvalOptions {
  std::string scores_path;
  std::string truth_path;
  std::string pred_path;  // optional; hardened scores otherwise
  bool has_header = true;
  std::string out_dir;
};

inline EvaluationReport cmd_eval(const EvalOptions& opt) {
  const ScoreCsv sc = read_score_csv(opt.scores_path, opt.has_header);
  const BinaryCsv truth = read_binary_csv(opt.truth_path, opt.has_header);
  if (!sc.label_names.empty() && !truth.label_names.empty() &&
      sc.label_names != truth.label_names)
    throw LabelMismatchError("score and truth headers disagree");
  LabelMatrix pred;
  if (opt.pred_path.empty()) {
    pred = harden(sc.scores);
  } else {
    const BinaryCsv p = read_binary_csv(opt.pred_path, opt.has_header);
    if (!p.label_names.empty() && !truth.label_names.empty() &&
        p.label_names != truth.label_names)
      throw LabelMismatchError("prediction and truth headers disagree");
    pred = p.labels;
  }
  const EvaluationReport report = evaluate(pred, sc.scores, truth.labels);
  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    detail::write_json_file(fs::path(opt.out_dir) / "report.json", to_json(report));
    std::ostringstream os;
    os << "metric,value\n";
    const auto values = metric_values(report);
    for (std::size_t i = 0; i < kMetricNames.size(); ++i)
      os << kMetricNames[i] << ',' << detail::format_double(values[i]) << '\n';
    detail::write_text_file(fs::path(opt.out_dir) / "report.csv", os.str());
  }
  return report;
}

}  // namespace flma
