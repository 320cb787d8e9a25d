#pragma once

// Association rules over label-sets. CP rules are mined from the label matrix
// as-is (co-presence), CA rules from its complement (co-absence). Support is
// count{antecedent ∪ consequent} / N and confidence is
// count{antecedent ∪ consequent} / count{antecedent}, both recounted from the
// transactions so the arithmetic stays in exact integer ratios.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flma/dataset.hpp"
#include "flma/detail/text.hpp"
#include "flma/errors.hpp"
#include "flma/fp_tree.hpp"
#include "flma/label_set.hpp"

namespace flma {

enum class RulePolarity : std::uint8_t { CP, CA };

inline const char* to_string(RulePolarity p) { return p == RulePolarity::CP ? "CP" : "CA"; }

inline RulePolarity parse_polarity(std::string_view s) {
  if (s == "CP") return RulePolarity::CP;
  if (s == "CA") return RulePolarity::CA;
  throw std::invalid_argument("unknown rule polarity '" + std::string(s) + "'");
}

struct MiningParams {
  double min_sup_cp = 0.1;
  double min_conf_cp = 0.5;
  // Co-absence thresholds sit much higher: zeros dominate a typical label
  // matrix, so low CA cutoffs would accept near-vacuous rules.
  double min_sup_ca = 0.8;
  double min_conf_ca = 0.9;
  std::size_t max_labelset_size = 3;
  bool use_frequency_filter = false;

  void validate() const {
    for (double t : {min_sup_cp, min_conf_cp, min_sup_ca, min_conf_ca})
      if (!(t > 0.0) || t > 1.0)
        throw std::invalid_argument("mining thresholds must lie in (0, 1]");
    if (max_labelset_size < 1)
      throw std::invalid_argument("max_labelset_size must be positive");
  }
};

struct AssociationRule {
  LabelSet antecedent;
  LabelSet consequent;
  RulePolarity polarity = RulePolarity::CP;
  double support = 0.0;
  double confidence = 0.0;

  AssociationRule() = default;
  AssociationRule(LabelSet ant, LabelSet cons, RulePolarity pol, double sup, double conf)
      : antecedent(std::move(ant)),
        consequent(std::move(cons)),
        polarity(pol),
        support(sup),
        confidence(conf) {
    if (antecedent.empty() || consequent.empty())
      throw std::invalid_argument("rule sides must be non-empty");
    if (antecedent.intersects(consequent))
      throw std::invalid_argument("rule sides must be disjoint");
  }

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

inline std::int64_t count_containing(const std::vector<LabelSet>& transactions,
                                     const LabelSet& set) {
  std::int64_t count = 0;
  for (const auto& t : transactions)
    if (t.contains_all(set)) ++count;
  return count;
}

// Every antecedent => consequent partition of each frequent set of size >= 2
// whose confidence meets min_conf. Emission order follows the frequent list;
// within one set, partitions enumerate antecedent subsets in bitmask order.
inline std::vector<AssociationRule> generate_rules(const std::vector<FrequentLabelSet>& frequent,
                                                   const std::vector<LabelSet>& transactions,
                                                   double min_conf, RulePolarity polarity) {
  const std::int64_t n = static_cast<std::int64_t>(transactions.size());
  std::vector<AssociationRule> out;
  std::map<LabelSet, std::int64_t> count_cache;
  auto count_of = [&](const LabelSet& s) {
    auto it = count_cache.find(s);
    if (it != count_cache.end()) return it->second;
    auto c = count_containing(transactions, s);
    count_cache.emplace(s, c);
    return c;
  };

  for (const auto& fs : frequent) {
    const auto& members = fs.labels.members();
    const std::size_t m = members.size();
    if (m < 2) continue;
    if (m > 20) throw std::invalid_argument("rule generation limited to label-sets of 20");
    const std::int64_t full_count = count_of(fs.labels);
    if (full_count <= 0) continue;

    const std::uint32_t limit = std::uint32_t{1} << m;
    for (std::uint32_t mask = 1; mask + 1 < limit; ++mask) {
      std::vector<int> ant, cons;
      for (std::size_t i = 0; i < m; ++i)
        (mask & (std::uint32_t{1} << i) ? ant : cons).push_back(members[i]);
      LabelSet antecedent(std::move(ant));
      const std::int64_t ant_count = count_of(antecedent);
      const double confidence =
          static_cast<double>(full_count) / static_cast<double>(ant_count);
      if (confidence < min_conf) continue;
      out.emplace_back(std::move(antecedent), LabelSet(std::move(cons)), polarity,
                       support_fraction(full_count, n), confidence);
    }
  }
  return out;
}

struct MinedRules {
  std::vector<AssociationRule> cp;
  std::vector<AssociationRule> ca;
};

// Full mining pass over a dataset: CP rules from the label rows, CA rules
// from the complemented rows. The optional frequency filter drops
// below-average-support labels from the CP transactions first.
inline MinedRules mine_cp_ca(const MultiLabelDataset& ds, const MiningParams& params) {
  params.validate();
  const std::int64_t n = static_cast<std::int64_t>(ds.instance_count());

  std::vector<LabelSet> cp_tx = transactions_from(ds.labels());
  if (params.use_frequency_filter) {
    const std::vector<int> kept = filter_frequent_labels(ds);
    const LabelSet keep(kept);
    for (auto& t : cp_tx) {
      std::vector<int> filtered;
      for (int l : t.members())
        if (keep.contains(l)) filtered.push_back(l);
      t = LabelSet(std::move(filtered));
    }
  }

  MinedRules rules;
  {
    FpTree tree = FpTree::build(cp_tx, params.min_sup_cp, n);
    auto frequent = extract_frequent_labelsets(tree, params.min_sup_cp, n,
                                               params.max_labelset_size);
    rules.cp = generate_rules(frequent, cp_tx, params.min_conf_cp, RulePolarity::CP);
  }
  {
    const std::vector<LabelSet> ca_tx = transactions_from(complement_labels(ds));
    FpTree tree = FpTree::build(ca_tx, params.min_sup_ca, n);
    auto frequent = extract_frequent_labelsets(tree, params.min_sup_ca, n,
                                               params.max_labelset_size);
    rules.ca = generate_rules(frequent, ca_tx, params.min_conf_ca, RulePolarity::CA);
  }
  return rules;
}

// Canonical application order: descending confidence, then descending
// support, then ascending antecedent, then ascending consequent, CP first.
inline bool rule_order_less(const AssociationRule& a, const AssociationRule& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.support != b.support) return a.support > b.support;
  if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
  if (a.consequent != b.consequent) return a.consequent < b.consequent;
  return a.polarity == RulePolarity::CP && b.polarity == RulePolarity::CA;
}

// Deduplicates on (antecedent, consequent) across both polarities, keeping
// the higher-confidence rule (ties: higher support, then CP), and sorts the
// survivors into the canonical application order.
inline std::vector<AssociationRule> clean_rules(const std::vector<AssociationRule>& cp,
                                                const std::vector<AssociationRule>& ca) {
  auto better = [](const AssociationRule& a, const AssociationRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support != b.support) return a.support > b.support;
    return a.polarity == RulePolarity::CP && b.polarity == RulePolarity::CA;
  };
  std::map<std::pair<LabelSet, LabelSet>, AssociationRule> best;
  for (const auto* list : {&cp, &ca})
    for (const auto& r : *list) {
      auto key = std::make_pair(r.antecedent, r.consequent);
      auto it = best.find(key);
      if (it == best.end()) best.emplace(std::move(key), r);
      else if (better(r, it->second)) it->second = r;
    }
  std::vector<AssociationRule> out;
  out.reserve(best.size());
  for (auto& [key, rule] : best) out.push_back(std::move(rule));
  std::sort(out.begin(), out.end(), rule_order_less);
  return out;
}

namespace detail {

inline std::string join_label_names(const LabelSet& set, std::span<const std::string> names) {
  std::string out;
  for (int l : set.members()) {
    if (static_cast<std::size_t>(l) >= names.size())
      throw std::out_of_range("rule references label index " + std::to_string(l) +
                              " beyond the name list");
    const std::string& name = names[static_cast<std::size_t>(l)];
    if (name.find_first_of(",\t\r\n") != std::string::npos)
      throw std::invalid_argument("label name '" + name + "' cannot appear in a rule file");
    if (!out.empty()) out.push_back(',');
    out += name;
  }
  return out;
}

}  // namespace detail

// Rule file: one rule per line, five tab-separated fields. Antecedent and
// consequent are comma-joined label names; support and confidence use the
// shortest round-trip decimal form, so a write/read cycle is lossless.
inline void write_rules(std::ostream& os, std::span<const AssociationRule> rules,
                        std::span<const std::string> label_names) {
  for (const auto& r : rules) {
    os << to_string(r.polarity) << '\t' << detail::join_label_names(r.antecedent, label_names)
       << '\t' << detail::join_label_names(r.consequent, label_names) << '\t'
       << detail::format_double(r.support) << '\t' << detail::format_double(r.confidence)
       << '\n';
  }
}

inline void write_rules_file(const std::string& path, std::span<const AssociationRule> rules,
                             std::span<const std::string> label_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  write_rules(out, rules, label_names);
}

inline std::vector<AssociationRule> read_rules(std::istream& is, const std::string& path,
                                               std::span<const std::string> label_names) {
  std::map<std::string_view, int> index_of;
  for (std::size_t i = 0; i < label_names.size(); ++i)
    index_of[label_names[i]] = static_cast<int>(i);

  auto parse_side = [&](std::string_view field, std::size_t line_no) {
    std::vector<int> members;
    for (auto piece : detail::split(field, ',')) {
      auto name = detail::trim(piece);
      auto it = index_of.find(name);
      if (it == index_of.end())
        throw LabelMismatchError(path + ":" + std::to_string(line_no) +
                                 ": unknown label '" + std::string(name) + "'");
      members.push_back(it->second);
    }
    return LabelSet::from_unsorted(std::move(members));
  };

  std::vector<AssociationRule> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 5)
      throw ParseError(path, line_no, "expected 5 tab-separated fields, got " +
                                          std::to_string(fields.size()));
    RulePolarity polarity;
    try {
      polarity = parse_polarity(detail::trim(fields[0]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
    auto support = detail::parse_double(detail::trim(fields[3]));
    auto confidence = detail::parse_double(detail::trim(fields[4]));
    if (!support || !confidence)
      throw ParseError(path, line_no, "invalid support or confidence value");
    try {
      out.emplace_back(parse_side(fields[1], line_no), parse_side(fields[2], line_no),
                       polarity, *support, *confidence);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return out;
}

inline std::vector<AssociationRule> read_rules_file(const std::string& path,
                                                    std::span<const std::string> label_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rule file: " + path);
  return read_rules(in, path, label_names);
}

}  // namespace flma
