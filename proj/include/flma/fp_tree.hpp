#pragma once

// FP-tree construction and FP-growth extraction of frequent label-sets.
//
// Items are ordered by descending filtered count (ties: ascending label
// index). Each transaction is filtered to frequent items, sorted by that
// order, and inserted as a prefix path; a per-label header chain links all
// nodes carrying that label in insertion order. Extraction grows suffixes
// from the least frequent item upward, building a conditional tree from the
// weighted prefix paths of each header chain.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flma/label_set.hpp"

namespace flma {

inline double support_fraction(std::int64_t count, std::int64_t n_transactions) {
  return static_cast<double>(count) / static_cast<double>(n_transactions);
}

// Support comparisons happen in exactly one place so the FP-growth miner and
// the naive enumerator can never disagree on a borderline count.
inline bool meets_min_sup(std::int64_t count, std::int64_t n_transactions, double min_sup) {
  return count > 0 && support_fraction(count, n_transactions) >= min_sup;
}

inline void validate_min_sup(double min_sup) {
  if (!(min_sup > 0.0) || min_sup > 1.0)
    throw std::invalid_argument("min_sup must lie in (0, 1]");
}

struct FpNode {
  int label = -1;  // -1 on the root
  std::int64_t count = 0;
  FpNode* parent = nullptr;
  std::vector<std::unique_ptr<FpNode>> children;

  FpNode* find_child(int l) {
    for (auto& c : children)
      if (c->label == l) return c.get();
    return nullptr;
  }
  const FpNode* find_child(int l) const {
    for (auto& c : children)
      if (c->label == l) return c.get();
    return nullptr;
  }
};

struct FrequentLabelSet {
  LabelSet labels;
  double support = 0.0;

  friend bool operator==(const FrequentLabelSet&, const FrequentLabelSet&) = default;
};

class FpTree {
 public:
  struct WeightedTransaction {
    std::vector<int> labels;  // distinct labels, any order
    std::int64_t weight = 1;
  };

  static FpTree build(const std::vector<LabelSet>& transactions, double min_sup,
                      std::int64_t n_transactions) {
    std::vector<WeightedTransaction> weighted;
    weighted.reserve(transactions.size());
    for (const auto& t : transactions)
      if (!t.empty()) weighted.push_back({t.members(), 1});
    return build_weighted(std::move(weighted), min_sup, n_transactions);
  }

  static FpTree build_weighted(std::vector<WeightedTransaction> transactions, double min_sup,
                               std::int64_t n_transactions) {
    validate_min_sup(min_sup);
    if (n_transactions < 1)
      throw std::invalid_argument("fp-tree: transaction total must be positive");

    FpTree tree;
    tree.n_ = n_transactions;
    tree.min_sup_ = min_sup;
    tree.root_ = std::make_unique<FpNode>();

    std::map<int, std::int64_t> raw;
    for (const auto& t : transactions)
      for (int l : t.labels) {
        if (l < 0) throw std::invalid_argument("fp-tree: negative label index");
        raw[l] += t.weight;
      }

    for (auto [label, count] : raw)
      if (meets_min_sup(count, n_transactions, min_sup)) tree.counts_[label] = count;

    tree.item_order_.reserve(tree.counts_.size());
    for (auto& [label, count] : tree.counts_) tree.item_order_.push_back(label);
    std::sort(tree.item_order_.begin(), tree.item_order_.end(), [&](int a, int b) {
      auto ca = tree.counts_[a], cb = tree.counts_[b];
      return ca != cb ? ca > cb : a < b;
    });
    std::map<int, std::size_t> rank;
    for (std::size_t i = 0; i < tree.item_order_.size(); ++i) rank[tree.item_order_[i]] = i;

    for (const auto& t : transactions) {
      std::vector<int> kept;
      for (int l : t.labels)
        if (rank.count(l)) kept.push_back(l);
      if (kept.empty()) continue;
      std::sort(kept.begin(), kept.end(), [&](int a, int b) { return rank[a] < rank[b]; });
      tree.insert_path(kept, t.weight);
    }
    return tree;
  }

  const FpNode& root() const { return *root_; }
  std::int64_t transaction_count() const { return n_; }
  double min_sup() const { return min_sup_; }
  bool empty() const { return root_->children.empty(); }

  // Surviving labels, most frequent first (ties: lowest index first).
  const std::vector<int>& item_order() const { return item_order_; }

  // Filtered count; zero for labels below min_sup.
  std::int64_t item_count(int label) const {
    auto it = counts_.find(label);
    return it == counts_.end() ? 0 : it->second;
  }

  // All nodes carrying `label`, in insertion order.
  const std::vector<FpNode*>& header_chain(int label) const {
    static const std::vector<FpNode*> kEmpty;
    auto it = header_.find(label);
    return it == header_.end() ? kEmpty : it->second;
  }

 private:
  void insert_path(const std::vector<int>& ordered_labels, std::int64_t weight) {
    FpNode* cur = root_.get();
    for (int l : ordered_labels) {
      FpNode* child = cur->find_child(l);
      if (!child) {
        auto node = std::make_unique<FpNode>();
        node->label = l;
        node->parent = cur;
        child = node.get();
        cur->children.push_back(std::move(node));
        header_[l].push_back(child);
      }
      child->count += weight;
      cur = child;
    }
  }

  std::unique_ptr<FpNode> root_;
  std::map<int, std::vector<FpNode*>> header_;
  std::map<int, std::int64_t> counts_;
  std::vector<int> item_order_;
  std::int64_t n_ = 0;
  double min_sup_ = 0.0;
};

inline FpTree build_fp_tree(const std::vector<LabelSet>& transactions, double min_sup,
                            std::int64_t n_transactions) {
  return FpTree::build(transactions, min_sup, n_transactions);
}

namespace detail {

inline std::vector<int> with_label(const std::vector<int>& sorted, int label) {
  std::vector<int> out;
  out.reserve(sorted.size() + 1);
  auto pos = std::lower_bound(sorted.begin(), sorted.end(), label);
  out.insert(out.end(), sorted.begin(), pos);
  out.push_back(label);
  out.insert(out.end(), pos, sorted.end());
  return out;
}

inline void fp_grow(const FpTree& tree, const std::vector<int>& suffix, double min_sup,
                    std::int64_t n, std::size_t max_size, std::vector<FrequentLabelSet>& out) {
  const auto& order = tree.item_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int label = *it;
    const std::int64_t count = tree.item_count(label);
    if (!meets_min_sup(count, n, min_sup)) continue;
    auto itemset = with_label(suffix, label);
    out.push_back({LabelSet(itemset), support_fraction(count, n)});
    if (itemset.size() >= max_size) continue;

    // Conditional pattern base: the prefix path of every node in the chain,
    // weighted by that node's count.
    std::vector<FpTree::WeightedTransaction> paths;
    for (const FpNode* node : tree.header_chain(label)) {
      std::vector<int> path;
      for (const FpNode* p = node->parent; p && p->label >= 0; p = p->parent)
        path.push_back(p->label);
      if (path.empty()) continue;
      std::reverse(path.begin(), path.end());
      paths.push_back({std::move(path), node->count});
    }
    if (paths.empty()) continue;
    FpTree conditional = FpTree::build_weighted(std::move(paths), min_sup, n);
    if (!conditional.empty()) fp_grow(conditional, itemset, min_sup, n, max_size, out);
  }
}

inline void sort_frequent(std::vector<FrequentLabelSet>& sets) {
  std::sort(sets.begin(), sets.end(), [](const FrequentLabelSet& a, const FrequentLabelSet& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.labels < b.labels;
  });
}

}  // namespace detail

// FP-growth: every label-set of size 1..max_size whose support meets min_sup,
// sorted by descending support, ties by ascending lexicographic members.
inline std::vector<FrequentLabelSet> extract_frequent_labelsets(const FpTree& tree,
                                                                double min_sup,
                                                                std::int64_t n_transactions,
                                                                std::size_t max_size) {
  validate_min_sup(min_sup);
  if (max_size < 1) throw std::invalid_argument("max_size must be positive");
  if (n_transactions < 1)
    throw std::invalid_argument("transaction total must be positive");
  std::vector<FrequentLabelSet> out;
  detail::fp_grow(tree, {}, min_sup, n_transactions, max_size, out);
  detail::sort_frequent(out);
  return out;
}

// Exhaustive reference enumeration over the label universe present in the
// transactions. Exponential; refuses more than 20 distinct labels.
inline std::vector<FrequentLabelSet> enumerate_frequent_labelsets_naive(
    const std::vector<LabelSet>& transactions, double min_sup, std::size_t max_size) {
  validate_min_sup(min_sup);
  if (max_size < 1) throw std::invalid_argument("max_size must be positive");

  std::vector<int> universe;
  for (const auto& t : transactions)
    for (int l : t.members()) universe.push_back(l);
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  if (universe.size() > 20)
    throw std::invalid_argument("naive enumeration limited to 20 distinct labels");

  const std::int64_t n = static_cast<std::int64_t>(transactions.size());
  std::vector<FrequentLabelSet> out;
  if (universe.empty() || n == 0) return out;

  std::map<int, std::size_t> bit_of;
  for (std::size_t i = 0; i < universe.size(); ++i) bit_of[universe[i]] = i;
  std::vector<std::uint32_t> masks;
  masks.reserve(transactions.size());
  for (const auto& t : transactions) {
    std::uint32_t m = 0;
    for (int l : t.members()) m |= std::uint32_t{1} << bit_of[l];
    masks.push_back(m);
  }

  const std::uint32_t limit = std::uint32_t{1} << universe.size();
  for (std::uint32_t subset = 1; subset < limit; ++subset) {
    if (static_cast<std::size_t>(std::popcount(subset)) > max_size) continue;
    std::int64_t count = 0;
    for (std::uint32_t m : masks)
      if ((m & subset) == subset) ++count;
    if (!meets_min_sup(count, n, min_sup)) continue;
    std::vector<int> members;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (subset & (std::uint32_t{1} << i)) members.push_back(universe[i]);
    out.push_back({LabelSet(std::move(members)), support_fraction(count, n)});
  }
  detail::sort_frequent(out);
  return out;
}

}  // namespace flma
