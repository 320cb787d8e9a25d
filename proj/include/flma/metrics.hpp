#pragma once

// Seven multi-label evaluation metrics.
//
//   hamming_loss     fraction of wrong cells
//   ranking_loss     per instance: fraction of (relevant, irrelevant) score
//                    pairs ranked wrongly; equal scores count half. Instances
//                    without such a pair are skipped.
//   one_error        fraction of instances whose top-scored label (lowest
//                    index on ties) is irrelevant; empty-truth rows skipped.
//   subset_accuracy  fraction of exactly-matching rows
//   accuracy         mean per-instance Jaccard overlap; rows with an empty
//                    union count as 1.
//   macro_f1         mean of per-label F1; labels with no positives anywhere
//                    contribute 0.
//   micro_f1         F1 over pooled counts; an empty pool counts as 1.
//
// Skip-style metrics average over the instances that remain; if none remain
// the metric is 0.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "flma/matrix.hpp"

namespace flma {

struct EvaluationReport {
  double hamming_loss = 0.0;
  double ranking_loss = 0.0;
  double one_error = 0.0;
  double subset_accuracy = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

inline constexpr std::array<const char*, 7> kMetricNames = {
    "hamming_loss", "ranking_loss", "one_error", "subset_accuracy",
    "macro_f1",     "micro_f1",     "accuracy"};

inline std::array<double, 7> metric_values(const EvaluationReport& r) {
  return {r.hamming_loss, r.ranking_loss,  r.one_error, r.subset_accuracy,
          r.macro_f1,     r.micro_f1,      r.accuracy};
}

inline EvaluationReport evaluate(const LabelMatrix& predicted, const ScoreMatrix& scores,
                                 const LabelMatrix& truth) {
  const std::size_t n = truth.rows();
  const std::size_t c_count = truth.cols();
  if (n == 0 || c_count == 0) throw std::invalid_argument("evaluate: empty truth matrix");
  if (predicted.rows() != n || predicted.cols() != c_count)
    throw std::invalid_argument("evaluate: prediction shape does not match truth");
  if (scores.rows() != n || scores.cols() != c_count)
    throw std::invalid_argument("evaluate: score shape does not match truth");
  for (std::uint8_t v : truth.data())
    if (v > 1) throw std::invalid_argument("evaluate: truth matrix is not binary");
  for (std::uint8_t v : predicted.data())
    if (v > 1) throw std::invalid_argument("evaluate: prediction matrix is not binary");

  EvaluationReport rep;

  // Hamming loss, subset accuracy, Jaccard accuracy.
  std::size_t wrong_cells = 0, exact_rows = 0;
  double jaccard_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t inter = 0, uni = 0, diff = 0;
    for (std::size_t c = 0; c < c_count; ++c) {
      const bool p = predicted(r, c), t = truth(r, c);
      if (p != t) ++diff;
      if (p && t) ++inter;
      if (p || t) ++uni;
    }
    wrong_cells += diff;
    if (diff == 0) ++exact_rows;
    jaccard_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  rep.hamming_loss = static_cast<double>(wrong_cells) / static_cast<double>(n * c_count);
  rep.subset_accuracy = static_cast<double>(exact_rows) / static_cast<double>(n);
  rep.accuracy = jaccard_sum / static_cast<double>(n);

  // Ranking loss: equal-score pairs count half a violation.
  double rl_sum = 0.0;
  std::size_t rl_rows = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double violations = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < c_count; ++a) {
      if (!truth(r, a)) continue;
      for (std::size_t b = 0; b < c_count; ++b) {
        if (truth(r, b)) continue;
        ++pairs;
        if (scores(r, a) < scores(r, b)) violations += 1.0;
        else if (scores(r, a) == scores(r, b)) violations += 0.5;
      }
    }
    if (pairs == 0) continue;
    rl_sum += violations / static_cast<double>(pairs);
    ++rl_rows;
  }
  rep.ranking_loss = rl_rows ? rl_sum / static_cast<double>(rl_rows) : 0.0;

  // One-error: first maximum wins on ties.
  std::size_t oe_errors = 0, oe_rows = 0;
  for (std::size_t r = 0; r < n; ++r) {
    bool any_relevant = false;
    for (std::size_t c = 0; c < c_count; ++c)
      if (truth(r, c)) { any_relevant = true; break; }
    if (!any_relevant) continue;
    std::size_t top = 0;
    for (std::size_t c = 1; c < c_count; ++c)
      if (scores(r, c) > scores(r, top)) top = c;
    ++oe_rows;
    if (!truth(r, top)) ++oe_errors;
  }
  rep.one_error = oe_rows ? static_cast<double>(oe_errors) / static_cast<double>(oe_rows) : 0.0;

  // Macro and micro F1.
  double macro_sum = 0.0;
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t c = 0; c < c_count; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const bool p = predicted(r, c), t = truth(r, c);
      if (p && t) ++tp;
      else if (p) ++fp;
      else if (t) ++fn;
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    const std::size_t denom = 2 * tp + fp + fn;
    macro_sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  rep.macro_f1 = macro_sum / static_cast<double>(c_count);
  const std::size_t micro_denom = 2 * tp_all + fp_all + fn_all;
  rep.micro_f1 =
      micro_denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp_all) / static_cast<double>(micro_denom);

  return rep;
}

// Arithmetic mean of each metric across fold reports.
inline EvaluationReport aggregate(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  EvaluationReport out;
  for (const auto& r : reports) {
    out.hamming_loss += r.hamming_loss;
    out.ranking_loss += r.ranking_loss;
    out.one_error += r.one_error;
    out.subset_accuracy += r.subset_accuracy;
    out.macro_f1 += r.macro_f1;
    out.micro_f1 += r.micro_f1;
    out.accuracy += r.accuracy;
  }
  const double n = static_cast<double>(reports.size());
  out.hamming_loss /= n;
  out.ranking_loss /= n;
  out.one_error /= n;
  out.subset_accuracy /= n;
  out.macro_f1 /= n;
  out.micro_f1 /= n;
  out.accuracy /= n;
  return out;
}

}  // namespace flma
