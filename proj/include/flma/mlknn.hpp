#pragma once

// ML-KNN baseline. For each label l the model keeps a smoothed prior
// P(H1) = (s + relevant_count) / (2s + N) and smoothed conditionals
// P(tally | H) over the number of relevant neighbors among the k nearest
// (self excluded during fitting). Prediction scores a test instance with the
// posterior P(H1 | tally) via Bayes' rule.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flma/dataset.hpp"
#include "flma/matrix.hpp"

namespace flma {

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Indices of the k rows nearest to `query` (squared Euclidean, ties broken by
// ascending row index). `exclude` skips one row; pass -1 to keep all.
inline std::vector<int> k_nearest_rows(const Matrix<double>& features,
                                       std::span<const double> query, int k, int exclude) {
  std::vector<std::pair<double, int>> dist;
  dist.reserve(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    if (static_cast<int>(r) == exclude) continue;
    dist.emplace_back(squared_distance(features.row(r), query), static_cast<int>(r));
  }
  if (static_cast<std::size_t>(k) > dist.size())
    throw std::invalid_argument("k_nearest_rows: k exceeds candidate count");
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
  return out;
}

}  // namespace detail

class MlknnModel {
 public:
  static MlknnModel fit(const MultiLabelDataset& train, int k = 10, double smoothing = 1.0) {
    const std::size_t n = train.instance_count();
    const std::size_t c_count = train.label_count();
    if (k < 1) throw std::invalid_argument("mlknn: k must be positive");
    if (static_cast<std::size_t>(k) >= n)
      throw std::invalid_argument("mlknn: k must be smaller than the training set");
    if (!(smoothing > 0.0)) throw std::invalid_argument("mlknn: smoothing must be positive");

    MlknnModel model;
    model.k_ = k;
    model.s_ = smoothing;
    model.features_ = train.features();
    model.train_labels_ = train.labels();
    model.prior_h1_.resize(c_count);

    const LabelMatrix& labels = train.labels();
    for (std::size_t l = 0; l < c_count; ++l) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < n; ++r) count += labels(r, l);
      model.prior_h1_[l] = (smoothing + static_cast<double>(count)) /
                           (2.0 * smoothing + static_cast<double>(n));
    }

    // c1[l][t] / c0[l][t]: training instances with tally t among their k
    // nearest peers, split by whether the label is relevant for them.
    Matrix<double> c1(c_count, static_cast<std::size_t>(k) + 1, 0.0);
    Matrix<double> c0(c_count, static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto neighbors =
          detail::k_nearest_rows(model.features_, model.features_.row(r), k, static_cast<int>(r));
      for (std::size_t l = 0; l < c_count; ++l) {
        std::size_t tally = 0;
        for (int nb : neighbors) tally += labels(static_cast<std::size_t>(nb), l);
        if (labels(r, l)) c1(l, tally) += 1.0;
        else c0(l, tally) += 1.0;
      }
    }

    model.cond_h1_ = Matrix<double>(c_count, static_cast<std::size_t>(k) + 1);
    model.cond_h0_ = Matrix<double>(c_count, static_cast<std::size_t>(k) + 1);
    const double denom_span = smoothing * static_cast<double>(k + 1);
    for (std::size_t l = 0; l < c_count; ++l) {
      double sum1 = 0.0, sum0 = 0.0;
      for (int t = 0; t <= k; ++t) {
        sum1 += c1(l, static_cast<std::size_t>(t));
        sum0 += c0(l, static_cast<std::size_t>(t));
      }
      for (int t = 0; t <= k; ++t) {
        model.cond_h1_(l, static_cast<std::size_t>(t)) =
            (smoothing + c1(l, static_cast<std::size_t>(t))) / (denom_span + sum1);
        model.cond_h0_(l, static_cast<std::size_t>(t)) =
            (smoothing + c0(l, static_cast<std::size_t>(t))) / (denom_span + sum0);
      }
    }
    return model;
  }

  // Posterior P(relevant | tally) per test instance and label.
  ScoreMatrix predict_scores(const Matrix<double>& test_features) const {
    if (test_features.cols() != features_.cols())
      throw std::invalid_argument("mlknn: feature width does not match the training data");
    const std::size_t c_count = prior_h1_.size();
    ScoreMatrix scores(test_features.rows(), c_count);
    for (std::size_t r = 0; r < test_features.rows(); ++r) {
      const auto neighbors = detail::k_nearest_rows(features_, test_features.row(r), k_, -1);
      for (std::size_t l = 0; l < c_count; ++l) {
        std::size_t tally = 0;
        for (int nb : neighbors) tally += train_label(static_cast<std::size_t>(nb), l);
        const double h1 = prior_h1_[l] * cond_h1_(l, tally);
        const double h0 = (1.0 - prior_h1_[l]) * cond_h0_(l, tally);
        scores(r, l) = h1 / (h1 + h0);
      }
    }
    return scores;
  }

  int k() const noexcept { return k_; }
  double smoothing() const noexcept { return s_; }
  double prior_relevant(int label) const { return prior_h1_.at(static_cast<std::size_t>(label)); }
  double conditional(int label, int tally, bool relevant) const {
    const auto& m = relevant ? cond_h1_ : cond_h0_;
    if (label < 0 || static_cast<std::size_t>(label) >= m.rows() || tally < 0 ||
        static_cast<std::size_t>(tally) >= m.cols())
      throw std::out_of_range("mlknn: conditional index out of range");
    return m(static_cast<std::size_t>(label), static_cast<std::size_t>(tally));
  }

 private:
  std::uint8_t train_label(std::size_t r, std::size_t l) const { return train_labels_(r, l); }

  int k_ = 0;
  double s_ = 1.0;
  Matrix<double> features_;
  LabelMatrix train_labels_;
  std::vector<double> prior_h1_;
  Matrix<double> cond_h1_;
  Matrix<double> cond_h0_;
};

inline MlknnModel fit_mlknn(const MultiLabelDataset& train, int k = 10, double smoothing = 1.0) {
  return MlknnModel::fit(train, k, smoothing);
}

inline ScoreMatrix predict_scores_mlknn(const MlknnModel& model,
                                        const Matrix<double>& test_features) {
  return model.predict_scores(test_features);
}

}  // namespace flma
