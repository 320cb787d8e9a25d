#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "flma/flma.hpp"
#include "test_support.hpp"

using namespace flma;

namespace {

// {A,B}, {A}, {B}, {A,B} with A=0, B=1.
std::vector<LabelSet> four_transactions() {
  return {LabelSet({0, 1}), LabelSet({0}), LabelSet({1}), LabelSet({0, 1})};
}

std::int64_t count_with(const std::vector<LabelSet>& tx, const LabelSet& s) {
  std::int64_t n = 0;
  for (const auto& t : tx)
    if (t.contains_all(s)) ++n;
  return n;
}

std::vector<LabelSet> random_transactions(std::mt19937& rng, std::size_t n, std::size_t c,
                                          double density) {
  return transactions_from(test_support::random_label_matrix(rng, n, c, density));
}

}  // namespace

TEST_CASE("fp-tree structure on the four transaction fixture") {
  const auto tx = four_transactions();
  const FpTree tree = build_fp_tree(tx, 0.5, 4);

  CHECK(tree.item_count(0) == 3);
  CHECK(tree.item_count(1) == 3);
  // Equal counts break ties toward the lower label index.
  CHECK(tree.item_order() == std::vector<int>{0, 1});

  // root -> 0(count 3) -> 1(count 2), and root -> 1(count 1).
  const FpNode& root = tree.root();
  REQUIRE(root.children.size() == 2);
  const FpNode* a = root.find_child(0);
  const FpNode* b_top = root.find_child(1);
  REQUIRE(a != nullptr);
  REQUIRE(b_top != nullptr);
  CHECK(a->count == 3);
  CHECK(b_top->count == 1);
  REQUIRE(a->children.size() == 1);
  const FpNode* b_under_a = a->children[0].get();
  CHECK(b_under_a->label == 1);
  CHECK(b_under_a->count == 2);
  CHECK(b_under_a->parent == a);

  // Header chains run in insertion order and their counts sum to the item count.
  const auto& chain1 = tree.header_chain(1);
  REQUIRE(chain1.size() == 2);
  CHECK(chain1[0] == b_under_a);
  CHECK(chain1[1] == b_top);
  std::int64_t sum = 0;
  for (const FpNode* n : chain1) sum += n->count;
  CHECK(sum == tree.item_count(1));
  CHECK(tree.header_chain(7).empty());
}

TEST_CASE("fp-growth extraction matches the frozen fixture") {
  const auto tx = four_transactions();
  const FpTree tree = build_fp_tree(tx, 0.5, 4);
  const auto sets = extract_frequent_labelsets(tree, 0.5, 4, 3);

  const std::vector<FrequentLabelSet> expected = {
      {LabelSet({0}), 0.75}, {LabelSet({1}), 0.75}, {LabelSet({0, 1}), 0.5}};
  CHECK(sets == expected);
}

TEST_CASE("max_size bounds extraction") {
  const auto tx = four_transactions();
  const FpTree tree = build_fp_tree(tx, 0.5, 4);
  const auto sets = extract_frequent_labelsets(tree, 0.5, 4, 1);
  const std::vector<FrequentLabelSet> expected = {{LabelSet({0}), 0.75}, {LabelSet({1}), 0.75}};
  CHECK(sets == expected);
}

TEST_CASE("items below min_sup are filtered out") {
  const auto tx = four_transactions();
  const FpTree tree = build_fp_tree(tx, 0.6, 4);
  const auto sets = extract_frequent_labelsets(tree, 0.6, 4, 3);
  const std::vector<FrequentLabelSet> expected = {{LabelSet({0}), 0.75}, {LabelSet({1}), 0.75}};
  CHECK(sets == expected);
}

TEST_CASE("naive enumeration agrees on the fixture") {
  const auto tx = four_transactions();
  const auto naive = enumerate_frequent_labelsets_naive(tx, 0.5, 3);
  const FpTree tree = build_fp_tree(tx, 0.5, 4);
  CHECK(naive == extract_frequent_labelsets(tree, 0.5, 4, 3));
}

TEST_CASE("empty and degenerate transaction lists") {
  const std::vector<LabelSet> empties(3);  // three empty transactions
  const FpTree tree = build_fp_tree(empties, 0.5, 3);
  CHECK(tree.empty());
  CHECK(extract_frequent_labelsets(tree, 0.5, 3, 3).empty());
  CHECK(enumerate_frequent_labelsets_naive(empties, 0.5, 3).empty());
  CHECK(enumerate_frequent_labelsets_naive({}, 0.5, 3).empty());
}

TEST_CASE("threshold validation") {
  const auto tx = four_transactions();
  CHECK_THROWS_AS(build_fp_tree(tx, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_fp_tree(tx, 1.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_fp_tree(tx, -0.1, 4), std::invalid_argument);
  const FpTree tree = build_fp_tree(tx, 1.0, 4);
  CHECK_THROWS_AS(extract_frequent_labelsets(tree, 0.5, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_frequent_labelsets_naive(tx, 2.0, 3), std::invalid_argument);
}

TEST_CASE("a tiny min_sup keeps every occurring subset") {
  const auto tx = four_transactions();
  const auto naive = enumerate_frequent_labelsets_naive(tx, 1e-12, 3);
  CHECK(naive.size() == 3);  // {0}, {1}, {0,1} all occur at least once
}

TEST_CASE("fp-growth equals naive enumeration on random matrices") {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 20 + rng() % 41;
    const std::size_t c = 4 + rng() % 7;
    const double density = 0.15 + 0.8 * (static_cast<double>(rng() % 100) / 100.0);
    const auto tx = random_transactions(rng, n, c, density);
    for (double min_sup : {0.1, 0.3, 0.5, 0.8}) {
      for (std::size_t max_size : {std::size_t{2}, std::size_t{3}, c}) {
        const FpTree tree = build_fp_tree(tx, min_sup, static_cast<std::int64_t>(n));
        const auto grown = extract_frequent_labelsets(tree, min_sup, static_cast<std::int64_t>(n), max_size);
        const auto naive = enumerate_frequent_labelsets_naive(tx, min_sup, max_size);
        REQUIRE(grown == naive);
      }
    }
  }
}

TEST_CASE("rule construction validates its sides") {
  CHECK_THROWS_AS(AssociationRule(LabelSet{}, LabelSet{1}, RulePolarity::CP, 0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(AssociationRule(LabelSet{1}, LabelSet{}, RulePolarity::CP, 0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(AssociationRule(LabelSet{1, 2}, LabelSet{2}, RulePolarity::CP, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("rule generation on the fixture") {
  const auto tx = four_transactions();
  const FpTree tree = build_fp_tree(tx, 0.5, 4);
  const auto frequent = extract_frequent_labelsets(tree, 0.5, 4, 3);

  const auto rules = generate_rules(frequent, tx, 0.5, RulePolarity::CP);
  REQUIRE(rules.size() == 2);
  for (const auto& r : rules) {
    CHECK(r.support == 0.5);
    CHECK(r.confidence == 2.0 / 3.0);
    CHECK(r.polarity == RulePolarity::CP);
  }
  CHECK(rules[0].antecedent == LabelSet{0});
  CHECK(rules[0].consequent == LabelSet{1});
  CHECK(rules[1].antecedent == LabelSet{1});
  CHECK(rules[1].consequent == LabelSet{0});

  CHECK(generate_rules(frequent, tx, 0.7, RulePolarity::CP).empty());
}

TEST_CASE("rule arithmetic is exact over random transactions") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + rng() % 40;
    const std::size_t c = 4 + rng() % 5;
    const auto tx = random_transactions(rng, n, c, 0.5);
    const auto frequent = enumerate_frequent_labelsets_naive(tx, 0.15, 3);
    const auto rules = generate_rules(frequent, tx, 0.2, RulePolarity::CP);
    for (const auto& r : rules) {
      REQUIRE_FALSE(r.antecedent.empty());
      REQUIRE_FALSE(r.consequent.empty());
      REQUIRE_FALSE(r.antecedent.intersects(r.consequent));

      std::vector<int> all = r.antecedent.members();
      for (int l : r.consequent.members()) all.push_back(l);
      const LabelSet full = LabelSet::from_unsorted(std::move(all));
      const std::int64_t full_count = count_with(tx, full);
      const std::int64_t ant_count = count_with(tx, r.antecedent);
      REQUIRE(r.support == static_cast<double>(full_count) / static_cast<double>(n));
      REQUIRE(r.confidence == static_cast<double>(full_count) / static_cast<double>(ant_count));
      REQUIRE(r.confidence >= r.support);
      REQUIRE(r.confidence >= 0.2);
      REQUIRE(r.confidence <= 1.0);
      REQUIRE(r.support > 0.0);
    }
  }
}

TEST_CASE("clean rules dedupes and orders") {
  const AssociationRule cp_low(LabelSet{0}, LabelSet{1}, RulePolarity::CP, 0.5, 0.8);
  const AssociationRule ca_high(LabelSet{0}, LabelSet{1}, RulePolarity::CA, 0.5, 0.9);
  const AssociationRule cp_tie(LabelSet{0}, LabelSet{2}, RulePolarity::CP, 0.4, 0.9);
  const AssociationRule ca_tie(LabelSet{0}, LabelSet{2}, RulePolarity::CA, 0.4, 0.9);
  const AssociationRule other(LabelSet{1}, LabelSet{2}, RulePolarity::CA, 0.6, 0.9);

  const auto cleaned = clean_rules({cp_low, cp_tie}, {ca_high, ca_tie, other});
  REQUIRE(cleaned.size() == 3);

  // Same (antecedent, consequent): the higher-confidence CA wins.
  // Exact tie on confidence and support: CP wins.
  // Ordering: confidence desc, support desc, antecedent asc, consequent asc.
  CHECK(cleaned[0] == other);    // conf 0.9, support 0.6
  CHECK(cleaned[1] == ca_high);  // conf 0.9, support 0.5, ant {0}
  CHECK(cleaned[2] == cp_tie);   // conf 0.9, support 0.4
  CHECK(cleaned[1].polarity == RulePolarity::CA);
  CHECK(cleaned[2].polarity == RulePolarity::CP);
}

TEST_CASE("clean rules puts CP before CA on full ties") {
  const AssociationRule cp(LabelSet{0}, LabelSet{1}, RulePolarity::CP, 0.5, 0.9);
  const AssociationRule ca(LabelSet{0}, LabelSet{2}, RulePolarity::CA, 0.5, 0.9);
  const auto cleaned = clean_rules({cp}, {ca});
  REQUIRE(cleaned.size() == 2);
  // Identical confidence and support; antecedents tie; consequent {1} < {2}.
  CHECK(cleaned[0] == cp);
  CHECK(cleaned[1] == ca);
}

TEST_CASE("mining a dataset produces both polarities with their thresholds") {
  std::mt19937 rng(4242);
  const auto ds = test_support::synthetic_dataset(rng, 120, 6);
  MiningParams params;
  const auto mined = mine_cp_ca(ds, params);

  CHECK_FALSE(mined.cp.empty());
  for (const auto& r : mined.cp) {
    CHECK(r.polarity == RulePolarity::CP);
    CHECK(r.support >= params.min_sup_cp);
    CHECK(r.confidence >= params.min_conf_cp);
    CHECK(r.antecedent.size() + r.consequent.size() <= params.max_labelset_size);
  }
  for (const auto& r : mined.ca) {
    CHECK(r.polarity == RulePolarity::CA);
    CHECK(r.support >= params.min_sup_ca);
    CHECK(r.confidence >= params.min_conf_ca);
  }

  MiningParams bad;
  bad.min_sup_cp = 0.0;
  CHECK_THROWS_AS(mine_cp_ca(ds, bad), std::invalid_argument);
}

TEST_CASE("frequency filter drops rare labels from co-presence mining") {
  // Label 2 appears once; labels 0 and 1 dominate.
  LabelMatrix labels(6, 3, std::vector<std::uint8_t>{1, 1, 0, 1, 1, 0, 1, 1, 0,
                                                     1, 1, 0, 1, 1, 1, 1, 0, 0});
  MultiLabelDataset ds(Matrix<double>(6, 1), std::move(labels), {"a", "b", "c"});

  MiningParams params;
  params.min_sup_cp = 1.0 / 6.0;
  params.min_conf_cp = 0.1;
  params.use_frequency_filter = true;
  const auto mined = mine_cp_ca(ds, params);
  for (const auto& r : mined.cp) {
    CHECK_FALSE(r.antecedent.contains(2));
    CHECK_FALSE(r.consequent.contains(2));
  }

  params.use_frequency_filter = false;
  const auto unfiltered = mine_cp_ca(ds, params);
  bool mentions_rare = false;
  for (const auto& r : unfiltered.cp)
    mentions_rare = mentions_rare || r.antecedent.contains(2) || r.consequent.contains(2);
  CHECK(mentions_rare);
}

TEST_CASE("rule file round trips exactly") {
  std::mt19937 rng(77);
  const auto ds = test_support::synthetic_dataset(rng, 80, 5);
  MiningParams params;
  params.min_sup_ca = 0.5;
  params.min_conf_ca = 0.6;
  const auto mined = mine_cp_ca(ds, params);
  const auto cleaned = clean_rules(mined.cp, mined.ca);
  REQUIRE_FALSE(cleaned.empty());

  std::ostringstream os;
  write_rules(os, cleaned, ds.label_names());
  std::istringstream is(os.str());
  const auto back = read_rules(is, "mem", ds.label_names());
  REQUIRE(back.size() == cleaned.size());
  for (std::size_t i = 0; i < back.size(); ++i) REQUIRE(back[i] == cleaned[i]);
}

TEST_CASE("rule file parse errors") {
  const std::vector<std::string> names = {"a", "b"};

  std::istringstream unknown("CP\tz\tb\t0.5\t0.6\n");
  CHECK_THROWS_AS(read_rules(unknown, "f", names), LabelMismatchError);

  std::istringstream polarity("XX\ta\tb\t0.5\t0.6\n");
  CHECK_THROWS_AS(read_rules(polarity, "f", names), ParseError);

  std::istringstream fields("CP\ta\tb\t0.5\n");
  CHECK_THROWS_AS(read_rules(fields, "f", names), ParseError);

  std::istringstream number("CP\ta\tb\tx\t0.6\n");
  CHECK_THROWS_AS(read_rules(number, "f", names), ParseError);

  std::istringstream overlap("CP\ta\ta\t0.5\t0.6\n");
  CHECK_THROWS_AS(read_rules(overlap, "f", names), ParseError);

  std::istringstream blank("\nCP\ta\tb\t0.5\t0.6\n\n");
  CHECK(read_rules(blank, "f", names).size() == 1);
}
