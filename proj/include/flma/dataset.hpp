#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flma/label_set.hpp"
#include "flma/matrix.hpp"

namespace flma {

// Feature matrix plus binary label matrix; every pipeline stage consumes one.
class MultiLabelDataset {
 public:
  MultiLabelDataset(Matrix<double> features, LabelMatrix labels,
                    std::vector<std::string> label_names)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        label_names_(std::move(label_names)) {
    if (features_.rows() == 0) throw std::invalid_argument("dataset: no instances");
    if (labels_.cols() == 0) throw std::invalid_argument("dataset: no labels");
    if (features_.rows() != labels_.rows())
      throw std::invalid_argument("dataset: feature and label row counts differ");
    if (label_names_.size() != labels_.cols())
      throw std::invalid_argument("dataset: label name count does not match label columns");
    std::set<std::string> seen(label_names_.begin(), label_names_.end());
    if (seen.size() != label_names_.size())
      throw std::invalid_argument("dataset: duplicate label names");
    for (std::uint8_t v : labels_.data())
      if (v > 1) throw std::invalid_argument("dataset: label matrix must be binary");
  }

  const Matrix<double>& features() const noexcept { return features_; }
  const LabelMatrix& labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }

  std::size_t instance_count() const noexcept { return features_.rows(); }
  std::size_t feature_count() const noexcept { return features_.cols(); }
  std::size_t label_count() const noexcept { return labels_.cols(); }

  // Relevant label-set of one instance.
  LabelSet relevant_labels(std::size_t row) const {
    std::vector<int> members;
    for (std::size_t c = 0; c < labels_.cols(); ++c)
      if (labels_(row, c)) members.push_back(static_cast<int>(c));
    return LabelSet(std::move(members));
  }

  // Row subset in the given order; label names are shared.
  MultiLabelDataset subset(std::span<const int> rows) const {
    if (rows.empty()) throw std::invalid_argument("dataset subset: empty row selection");
    Matrix<double> f(rows.size(), features_.cols());
    LabelMatrix l(rows.size(), labels_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      int r = rows[i];
      if (r < 0 || static_cast<std::size_t>(r) >= features_.rows())
        throw std::out_of_range("dataset subset: row index out of range");
      for (std::size_t c = 0; c < features_.cols(); ++c) f(i, c) = features_(r, c);
      for (std::size_t c = 0; c < labels_.cols(); ++c) l(i, c) = labels_(r, c);
    }
    return MultiLabelDataset(std::move(f), std::move(l), label_names_);
  }

 private:
  Matrix<double> features_;
  LabelMatrix labels_;
  std::vector<std::string> label_names_;
};

// Fraction of instances for which `label` is relevant.
inline double label_support(const MultiLabelDataset& ds, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= ds.label_count())
    throw std::out_of_range("label_support: label index out of range");
  std::size_t count = 0;
  for (std::size_t r = 0; r < ds.instance_count(); ++r)
    count += ds.labels()(r, static_cast<std::size_t>(label));
  return static_cast<double>(count) / static_cast<double>(ds.instance_count());
}

// Flips every cell; co-absence mining runs on the result.
inline LabelMatrix complement_labels(const MultiLabelDataset& ds) {
  LabelMatrix out(ds.labels().rows(), ds.labels().cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = static_cast<std::uint8_t>(1 - ds.labels()(r, c));
  return out;
}

// Labels whose support is at least the mean support across all labels.
// With uniform supports every label is retained.
inline std::vector<int> filter_frequent_labels(const MultiLabelDataset& ds) {
  const std::size_t c_count = ds.label_count();
  std::vector<double> supports(c_count);
  for (std::size_t c = 0; c < c_count; ++c) supports[c] = label_support(ds, static_cast<int>(c));
  double mean = std::accumulate(supports.begin(), supports.end(), 0.0) /
                static_cast<double>(c_count);
  std::vector<int> kept;
  for (std::size_t c = 0; c < c_count; ++c)
    if (supports[c] >= mean) kept.push_back(static_cast<int>(c));
  return kept;
}

// One transaction per row: the indices of set cells. Empty rows stay in the
// list so they still count toward the transaction total.
inline std::vector<LabelSet> transactions_from(const LabelMatrix& labels) {
  std::vector<LabelSet> out;
  out.reserve(labels.rows());
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    std::vector<int> members;
    for (std::size_t c = 0; c < labels.cols(); ++c)
      if (labels(r, c)) members.push_back(static_cast<int>(c));
    out.emplace_back(std::move(members));
  }
  return out;
}

struct FoldSplit {
  int fold_id = 0;
  std::uint64_t seed = 0;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

// Deterministic k-fold partition. A hand-rolled Fisher-Yates shuffle keeps the
// permutation identical across standard library implementations. The first
// N mod k folds receive one extra test instance; indices are returned sorted.
inline std::vector<FoldSplit> kfold_split(const MultiLabelDataset& ds, int k, std::uint64_t seed) {
  const std::size_t n = ds.instance_count();
  if (k < 2) throw std::invalid_argument("kfold_split: k must be at least 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kfold_split: k exceeds instance count");

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }

  std::vector<FoldSplit> folds;
  folds.reserve(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t start = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    FoldSplit split;
    split.fold_id = f;
    split.seed = seed;
    split.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                              idx.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(split.test_indices.begin(), split.test_indices.end());
    split.train_indices.reserve(n - size);
    std::vector<char> in_test(n, 0);
    for (int t : split.test_indices) in_test[static_cast<std::size_t>(t)] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_test[i]) split.train_indices.push_back(static_cast<int>(i));
    folds.push_back(std::move(split));
    start += size;
  }
  return folds;
}

}  // namespace flma
