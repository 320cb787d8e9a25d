#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace flma {

// Ordered set of label indices: an instance's relevant (or complemented)
// label-set, a frequent itemset, or one side of an association rule.
// Members are strictly increasing and non-negative.
class LabelSet {
 public:
  LabelSet() = default;

  LabelSet(std::initializer_list<int> members) : LabelSet(std::vector<int>(members)) {}

  explicit LabelSet(std::vector<int> members) : members_(std::move(members)) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i] < 0) throw std::invalid_argument("label set: negative label index");
      if (i > 0 && members_[i] <= members_[i - 1])
        throw std::invalid_argument("label set: members must be strictly increasing");
    }
  }

  static LabelSet from_unsorted(std::vector<int> members) {
    std::sort(members.begin(), members.end());
    return LabelSet(std::move(members));
  }

  const std::vector<int>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  bool contains(int label) const {
    return std::binary_search(members_.begin(), members_.end(), label);
  }

  bool contains_all(const LabelSet& other) const {
    return std::includes(members_.begin(), members_.end(),
                         other.members_.begin(), other.members_.end());
  }

  bool intersects(const LabelSet& other) const {
    auto a = members_.begin();
    auto b = other.members_.begin();
    while (a != members_.end() && b != other.members_.end()) {
      if (*a == *b) return true;
      if (*a < *b) ++a; else ++b;
    }
    return false;
  }

  friend auto operator<=>(const LabelSet& a, const LabelSet& b) = default;

 private:
  std::vector<int> members_;
};

}  // namespace flma
