#pragma once

// Rule-based correction of uncertain classifier scores.
//
// Scores are partitioned per cell into certain-irrelevant (< lower threshold),
// certain-relevant (> upper threshold) and uncertain (the closed band between
// them). A CP rule fires on an instance when all its antecedent labels are
// certain-relevant; it then pushes each uncertain consequent score up. A CA
// rule fires when all antecedents are certain-irrelevant and pushes uncertain
// consequents down. The shift per cell is
//
//   delta = confidence * min(y, 1 - y) / max(x_dist, 1e-6)
//
// where y is the consequent's current score and x_dist is the largest
// distance to the nearest score bound (0 or 1) over the antecedent labels.
// Certainty tags are frozen from the original partition; scores accumulate
// across rule applications, clamped to [0, 1] after each one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flma/detail/text.hpp"
#include "flma/errors.hpp"
#include "flma/matrix.hpp"
#include "flma/rules.hpp"

namespace flma {

inline constexpr double kDeltaDenominatorFloor = 1e-6;

// Certain/uncertain band edges.
struct CertaintyThresholds {
  double lower = 0.3;
  double upper = 0.7;
  bool used_fallback = false;

  friend bool operator==(const CertaintyThresholds&, const CertaintyThresholds&) = default;
};

inline CertaintyThresholds make_thresholds(double lower, double upper) {
  if (!(lower > 0.0) || !(lower < 0.5) || !(upper > 0.5) || !(upper < 1.0))
    throw std::invalid_argument("certainty thresholds require 0 < lower < 0.5 < upper < 1");
  return {lower, upper, false};
}

// Thresholds from score moments: lower = mean - stddev clamped to
// [0.05, 0.45], upper = mean + stddev clamped to [0.55, 0.95].
inline CertaintyThresholds thresholds_from_moments(double mean, double stddev) {
  CertaintyThresholds t;
  t.lower = std::clamp(mean - stddev, 0.05, 0.45);
  t.upper = std::clamp(mean + stddev, 0.55, 0.95);
  return t;
}

// Fits thresholds on training scores via mean and population standard
// deviation. A constant matrix has no spread to work with; the fixed band
// (0.3, 0.7) is used instead and flagged.
inline CertaintyThresholds fit_thresholds(const ScoreMatrix& scores) {
  if (scores.empty()) throw std::invalid_argument("fit_thresholds: empty score matrix");
  for (double v : scores.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("fit_thresholds: score outside [0, 1]");
  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  for (double v : scores.data()) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : scores.data()) sq += (v - mean) * (v - mean);
  const double stddev = std::sqrt(sq / n);
  if (stddev == 0.0) return {0.3, 0.7, true};
  return thresholds_from_moments(mean, stddev);
}

enum class CellTag : std::uint8_t { CertainIrrelevant, Uncertain, CertainRelevant };

using CertaintyPartition = Matrix<CellTag>;

// Strict inequalities: a score equal to either threshold stays uncertain.
inline CertaintyPartition partition(const ScoreMatrix& scores, const CertaintyThresholds& thr) {
  CertaintyPartition tags(scores.rows(), scores.cols(), CellTag::Uncertain);
  for (std::size_t r = 0; r < scores.rows(); ++r)
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      const double v = scores(r, c);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("partition: score outside [0, 1]");
      if (v < thr.lower) tags(r, c) = CellTag::CertainIrrelevant;
      else if (v > thr.upper) tags(r, c) = CellTag::CertainRelevant;
    }
  return tags;
}

// Shift magnitude for one consequent cell. y is the consequent's current
// score; x_distance is the antecedent's largest distance to its nearest score
// bound, floored to keep the ratio finite.
inline double compute_delta(double confidence, double y_score, double x_distance) {
  const double ambiguity = std::min(y_score, 1.0 - y_score);
  return confidence * ambiguity / std::max(x_distance, kDeltaDenominatorFloor);
}

struct TraceEntry {
  int instance = 0;
  int label = 0;
  std::size_t rule_index = 0;
  RulePolarity polarity = RulePolarity::CP;
  double delta = 0.0;
  double before = 0.0;
  double after = 0.0;
};

struct CorrectionTrace {
  std::vector<TraceEntry> entries;
};

struct CorrectionResult {
  ScoreMatrix scores;
  CorrectionTrace trace;
};

// Applies rules to every instance in one pass. Rules fire in the given order
// (use clean_rules output); within a rule, uncertain consequents are corrected
// most ambiguous first (ties: ascending label index). Certainty tags never
// change during the pass; x_distance is computed on certain cells, whose
// scores are immutable, so it is identical on original and running scores.
inline CorrectionResult apply_rules(const ScoreMatrix& scores, const CertaintyPartition& tags,
                                    std::span<const AssociationRule> rules,
                                    [[maybe_unused]] const CertaintyThresholds& thr) {
  if (tags.rows() != scores.rows() || tags.cols() != scores.cols())
    throw std::invalid_argument("apply_rules: partition shape does not match scores");
  const std::size_t c_count = scores.cols();
  for (const auto& r : rules) {
    for (int l : r.antecedent.members())
      if (static_cast<std::size_t>(l) >= c_count)
        throw std::out_of_range("apply_rules: rule label index out of range");
    for (int l : r.consequent.members())
      if (static_cast<std::size_t>(l) >= c_count)
        throw std::out_of_range("apply_rules: rule label index out of range");
  }

  CorrectionResult result{scores, {}};
  ScoreMatrix& run = result.scores;

  for (std::size_t inst = 0; inst < scores.rows(); ++inst) {
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      const AssociationRule& rule = rules[ri];
      const CellTag needed = rule.polarity == RulePolarity::CP ? CellTag::CertainRelevant
                                                               : CellTag::CertainIrrelevant;
      bool fires = true;
      for (int l : rule.antecedent.members())
        if (tags(inst, static_cast<std::size_t>(l)) != needed) { fires = false; break; }
      if (!fires) continue;

      // Antecedent cells are certain, hence untouched by corrections.
      double x_distance = 0.0;
      for (int l : rule.antecedent.members()) {
        const double s = run(inst, static_cast<std::size_t>(l));
        x_distance = std::max(x_distance, std::min(s, 1.0 - s));
      }

      std::vector<int> targets;
      for (int l : rule.consequent.members())
        if (tags(inst, static_cast<std::size_t>(l)) == CellTag::Uncertain) targets.push_back(l);
      std::sort(targets.begin(), targets.end(), [&](int a, int b) {
        const double sa = run(inst, static_cast<std::size_t>(a));
        const double sb = run(inst, static_cast<std::size_t>(b));
        const double aa = std::min(sa, 1.0 - sa);
        const double ab = std::min(sb, 1.0 - sb);
        return aa != ab ? aa > ab : a < b;
      });

      for (int l : targets) {
        double& cell = run(inst, static_cast<std::size_t>(l));
        const double before = cell;
        const double delta = compute_delta(rule.confidence, before, x_distance);
        const double shifted =
            rule.polarity == RulePolarity::CP ? before + delta : before - delta;
        cell = std::clamp(shifted, 0.0, 1.0);
        result.trace.entries.push_back({static_cast<int>(inst), l, ri, rule.polarity, delta,
                                        before, cell});
      }
    }
  }
  return result;
}

// Hard labels at the global 0.5 threshold (scores of exactly 0.5 round up).
inline LabelMatrix harden(const ScoreMatrix& scores) {
  LabelMatrix out(scores.rows(), scores.cols());
  for (std::size_t r = 0; r < scores.rows(); ++r)
    for (std::size_t c = 0; c < scores.cols(); ++c)
      out(r, c) = scores(r, c) >= 0.5 ? 1 : 0;
  return out;
}

// Re-applies a trace to the original scores; used to audit correction runs.
inline ScoreMatrix replay_trace(const ScoreMatrix& original, const CorrectionTrace& trace) {
  ScoreMatrix out = original;
  for (const auto& e : trace.entries) {
    double& cell = out(static_cast<std::size_t>(e.instance), static_cast<std::size_t>(e.label));
    const double shifted = e.polarity == RulePolarity::CP ? cell + e.delta : cell - e.delta;
    cell = std::clamp(shifted, 0.0, 1.0);
  }
  return out;
}

inline void write_trace(std::ostream& os, const CorrectionTrace& trace,
                        std::span<const AssociationRule> rules,
                        std::span<const std::string> label_names) {
  os << "instance\tlabel\tpolarity\trule\tantecedent\tconsequent\tdelta\tbefore\tafter\n";
  for (const auto& e : trace.entries) {
    const auto& rule = rules[e.rule_index];
    os << e.instance << '\t' << label_names[static_cast<std::size_t>(e.label)] << '\t'
       << to_string(e.polarity) << '\t' << e.rule_index << '\t'
       << detail::join_label_names(rule.antecedent, label_names) << '\t'
       << detail::join_label_names(rule.consequent, label_names) << '\t'
       << detail::format_double(e.delta) << '\t' << detail::format_double(e.before) << '\t'
       << detail::format_double(e.after) << '\n';
  }
}

inline void write_trace_file(const std::string& path, const CorrectionTrace& trace,
                             std::span<const AssociationRule> rules,
                             std::span<const std::string> label_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  write_trace(out, trace, rules, label_names);
}

}  // namespace flma
