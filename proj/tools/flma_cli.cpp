// Command line front end.
//
//   flma mine     mine CP/CA association rules from a dataset
//   flma run      cross-validated baseline vs corrected comparison
//   flma correct  apply a rule file to a standalone score matrix
//   flma eval     compute the seven metrics for scores against truth
//
// Exit codes: 0 success, 1 usage or data errors, 2 unreadable/unwritable
// files, 3 label name mismatches.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flma/flma.hpp"

namespace {

void add_dataset_options(CLI::App* cmd, flma::RunConfig& cfg) {
  cmd->add_option("--data", cfg.data_path, "Dataset file (.arff or .csv)")->required();
  cmd->add_option("--xml", cfg.label_xml_path, "Label specification XML (ARFF input)");
  cmd->add_option("--label-count", cfg.csv_label_count,
                  "Number of trailing label columns (CSV input)");
}

void add_mining_options(CLI::App* cmd, flma::MiningParams& p) {
  cmd->add_option("--min-sup-cp", p.min_sup_cp, "Minimum co-presence support");
  cmd->add_option("--min-conf-cp", p.min_conf_cp, "Minimum co-presence confidence");
  cmd->add_option("--min-sup-ca", p.min_sup_ca, "Minimum co-absence support");
  cmd->add_option("--min-conf-ca", p.min_conf_ca, "Minimum co-absence confidence");
  cmd->add_option("--max-size", p.max_labelset_size, "Largest frequent label-set size");
  cmd->add_flag("--frequency-filter", p.use_frequency_filter,
                "Drop below-average-support labels before co-presence mining");
}

// Turns a flat key=value config file into --key=value tokens for one
// subcommand. Keys the subcommand does not know are skipped, so a saved run
// configuration can be replayed through `mine` as well.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw flma::IoError("cannot open config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view text = flma::detail::trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';' || text.front() == '[')
      continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw flma::ParseError(path + ": expected key=value, got '" + std::string(text) + "'");
    const std::string key(flma::detail::trim(text.substr(0, eq)));
    const std::string value(flma::detail::trim(text.substr(eq + 1)));
    if (key.empty()) throw flma::ParseError(path + ": line with empty key");
    if (sub->get_option_no_throw("--" + key) == nullptr) continue;
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Replaces `--config <file>` with the file's contents, spliced in directly
// after the subcommand name so that explicit flags, which come later, win.
void splice_config(std::vector<std::string>& tokens,
                   const std::map<std::string, CLI::App*>& subs) {
  std::size_t sub_at = tokens.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty() || tokens[i][0] == '-') continue;
    const auto it = subs.find(tokens[i]);
    if (it == subs.end()) return;  // let the parser report the unknown name
    sub = it->second;
    sub_at = i;
    break;
  }
  if (sub == nullptr) return;

  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = sub_at + 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == "--config" && i + 1 < tokens.size()) {
      path = tokens[++i];
    } else if (t.rfind("--config=", 0) == 0) {
      path = t.substr(9);
    } else {
      rest.push_back(t);
    }
  }
  if (path.empty()) return;

  std::vector<std::string> out(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(sub_at) + 1);
  for (auto& t : config_tokens(path, sub)) out.push_back(std::move(t));
  for (auto& t : rest) out.push_back(std::move(t));
  tokens = std::move(out);
}

// Explicit flags must override config-file values, so repeated options keep
// the last occurrence instead of erroring.
void keep_last_value(CLI::App* cmd) {
  for (CLI::Option* opt : cmd->get_options([](const CLI::Option*) { return true; }))
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void print_report(std::ostream& os, const char* name, const flma::EvaluationReport& r) {
  os << name << ":";
  const auto values = flma::metric_values(r);
  for (std::size_t i = 0; i < flma::kMetricNames.size(); ++i)
    os << "  " << flma::kMetricNames[i] << "=" << flma::detail::format_double(values[i]);
  os << "\n";
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Label-set mining and associative score correction"};
  app.require_subcommand(1);

  const char* config_help = "Flat key=value config; explicit flags take precedence";
  std::string config_path;  // consumed before parsing; registered for --help

  flma::RunConfig mine_cfg;
  auto* mine = app.add_subcommand("mine", "Mine CP/CA association rules from a dataset");
  mine->add_option("--config", config_path, config_help);
  add_dataset_options(mine, mine_cfg);
  add_mining_options(mine, mine_cfg.mining);
  mine->add_option("--out-dir", mine_cfg.out_dir, "Write rules.tsv, summary.json, config.ini");
  keep_last_value(mine);

  flma::RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "Cross-validated baseline vs corrected comparison");
  run->add_option("--config", config_path, config_help);
  add_dataset_options(run, run_cfg);
  add_mining_options(run, run_cfg.mining);
  run->add_option("--classifier", run_cfg.classifier, "Baseline classifier: mlknn or external");
  run->add_option("--k", run_cfg.knn_k, "Neighbor count for mlknn");
  run->add_option("--smoothing", run_cfg.knn_smoothing, "Laplace smoothing for mlknn");
  run->add_option("--scores", run_cfg.external_scores_path,
                  "Full N x C score CSV for the external classifier");
  bool run_no_header = false;
  run->add_flag("--no-header", run_no_header, "External score CSV has no header row");
  run->add_option("--thr-lower", run_cfg.threshold_lower, "Fixed lower certainty threshold");
  run->add_option("--thr-upper", run_cfg.threshold_upper, "Fixed upper certainty threshold");
  run->add_option("--folds", run_cfg.folds, "Cross-validation folds");
  run->add_option("--runs", run_cfg.runs, "Repetitions with seeds seed, seed+1, ...");
  run->add_option("--seed", run_cfg.seed, "Base shuffle seed");
  run->add_flag("--trace", run_cfg.write_trace, "Write per-fold correction traces");
  run->add_option("--out-dir", run_cfg.out_dir, "Output directory")->required();
  keep_last_value(run);

  flma::CorrectOptions correct_opt;
  auto* correct = app.add_subcommand("correct", "Apply a rule file to a score matrix");
  correct->add_option("--scores", correct_opt.scores_path, "Score CSV")->required();
  correct->add_option("--rules", correct_opt.rules_path, "Rule file (tab-separated)")->required();
  bool correct_no_header = false;
  correct->add_flag("--no-header", correct_no_header, "Score CSV has no header row");
  correct->add_option("--labels", correct_opt.label_names,
                      "Label names, replacing the CSV header")->delimiter(',');
  correct->add_option("--thr-lower", correct_opt.threshold_lower, "Fixed lower certainty threshold");
  correct->add_option("--thr-upper", correct_opt.threshold_upper, "Fixed upper certainty threshold");
  correct->add_flag("--trace", correct_opt.write_trace, "Write the correction trace");
  correct->add_option("--out-dir", correct_opt.out_dir, "Output directory")->required();

  flma::EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "Evaluate scores (and optional hard labels) against truth");
  eval->add_option("--scores", eval_opt.scores_path, "Score CSV")->required();
  eval->add_option("--truth", eval_opt.truth_path, "Binary truth CSV")->required();
  eval->add_option("--pred", eval_opt.pred_path,
                   "Binary prediction CSV (default: scores thresholded at 0.5)");
  bool eval_no_header = false;
  eval->add_flag("--no-header", eval_no_header, "CSV files have no header row");
  eval->add_option("--out-dir", eval_opt.out_dir, "Also write report.json and report.csv");

  std::vector<std::string> tokens(argv + 1, argv + argc);
  splice_config(tokens, {{"mine", mine}, {"run", run}});
  std::reverse(tokens.begin(), tokens.end());

  try {
    app.parse(std::move(tokens));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (mine->parsed()) {
    const auto outcome = flma::cmd_mine(mine_cfg);
    std::cout << "cp rules: " << outcome.cp_rule_count << "\n"
              << "ca rules: " << outcome.ca_rule_count << "\n"
              << "cleaned rules: " << outcome.rules.size() << "\n";
    if (mine_cfg.out_dir.empty()) flma::write_rules(std::cout, outcome.rules, outcome.label_names);
    return 0;
  }

  if (run->parsed()) {
    run_cfg.scores_have_header = !run_no_header;
    const auto summary = flma::cmd_run(run_cfg);
    std::cout << "instances: " << summary.instances << "  labels: " << summary.labels
              << "  folds: " << run_cfg.folds << "  runs: " << run_cfg.runs << "\n";
    print_report(std::cout, "baseline", summary.baseline);
    print_report(std::cout, "flma    ", summary.corrected);
    for (const auto& fo : summary.folds)
      if (fo.diagnostics.thresholds.used_fallback)
        std::cerr << "warning: run " << fo.run << " fold " << fo.split.fold_id
                  << ": constant training scores, using fallback thresholds (0.3, 0.7)\n";
    return 0;
  }

  if (correct->parsed()) {
    correct_opt.scores_have_header = !correct_no_header;
    const auto outcome = flma::cmd_correct(correct_opt);
    if (outcome.thresholds.used_fallback)
      std::cerr << "warning: constant scores, using fallback thresholds (0.3, 0.7)\n";
    std::cout << "rules: " << outcome.rules.size()
              << "  corrections: " << outcome.trace.entries.size() << "\n"
              << "thresholds: [" << flma::detail::format_double(outcome.thresholds.lower)
              << ", " << flma::detail::format_double(outcome.thresholds.upper) << "]\n";
    return 0;
  }

  eval_opt.has_header = !eval_no_header;
  const auto report = flma::cmd_eval(eval_opt);
  std::cout << flma::to_json(report).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const flma::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const flma::LabelMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
