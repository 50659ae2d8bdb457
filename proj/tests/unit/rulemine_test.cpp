#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "rijepa/rulemine/discretize.hpp"
#include "rijepa/rulemine/fp_growth.hpp"
#include "rijepa/rulemine/rule_io.hpp"
#include "rijepa/rulemine/rules.hpp"
#include "support/powerset.hpp"

namespace rm = rijepa::rulemine;
using rijepa::RngStream;

namespace {

rm::RawTable one_row(std::vector<std::pair<std::string, double>> cells) {
  rm::RawTable t;
  std::vector<double> row;
  for (auto& [name, v] : cells) {
    t.columns.push_back(name);
    row.push_back(v);
  }
  t.rows.push_back(row);
  return t;
}

rm::BinningSpec only_continuous() {
  auto spec = rm::default_clinical_binning();
  spec.categorical.clear();
  return spec;
}

rm::RawTable clinical_row(double age, double trestbps, double chol, double thalach, double oldpeak) {
  return one_row({{"age", age}, {"trestbps", trestbps}, {"chol", chol}, {"thalach", thalach},
                  {"oldpeak", oldpeak}});
}

std::string token_of(const rm::Discretized& d, const std::string& feature) {
  for (const auto& item : d.transactions.at(0).items())
    if (item.feature == feature) return item.token();
  return {};
}

}  // namespace

TEST(Discretize, BinsFollowClinicalCutoffs) {
  auto d = rm::discretize(clinical_row(35, 120, 180, 180, 0.0), only_continuous());
  EXPECT_EQ(token_of(d, "age_group"), "age_group=Young");
  EXPECT_EQ(token_of(d, "thalach_level"), "thalach_level=High");
  EXPECT_EQ(token_of(d, "oldpeak_level"), "oldpeak_level=None");

  d = rm::discretize(clinical_row(50, 130, 239.9, 119, 2.0), only_continuous());
  EXPECT_EQ(token_of(d, "age_group"), "age_group=Middle");
  EXPECT_EQ(token_of(d, "trestbps_level"), "trestbps_level=Elevated");
  EXPECT_EQ(token_of(d, "chol_level"), "chol_level=Borderline");
  EXPECT_EQ(token_of(d, "thalach_level"), "thalach_level=Low");
  EXPECT_EQ(token_of(d, "oldpeak_level"), "oldpeak_level=Mild");

  d = rm::discretize(clinical_row(60, 160, 240, 160, 2.1), only_continuous());
  EXPECT_EQ(token_of(d, "age_group"), "age_group=Senior");
  EXPECT_EQ(token_of(d, "oldpeak_level"), "oldpeak_level=Severe");
  EXPECT_EQ(d.vocabulary.size(), 5u);
}

TEST(Discretize, OutOfRangeNamesFeature) {
  try {
    rm::discretize(clinical_row(-3, 120, 180, 150, 0), only_continuous());
    FAIL() << "expected BinningError";
  } catch (const rm::BinningError& e) {
    EXPECT_NE(std::string(e.what()).find("age_group"), std::string::npos);
  }
}

TEST(Discretize, CategoricalPassThroughAndVocabularySorted) {
  rm::BinningSpec spec;
  spec.categorical = {"cp", "thal"};
  rm::RawTable t{{"cp", "thal"}, {{4, 7}, {1, 3}}};
  auto d = rm::discretize(t, spec);
  EXPECT_EQ(d.transactions[0].tokens(), (std::vector<std::string>{"cp=4.0", "thal=7.0"}));
  EXPECT_EQ(d.vocabulary.tokens(),
            (std::vector<std::string>{"cp=1.0", "cp=4.0", "thal=3.0", "thal=7.0"}));
  EXPECT_THROW(d.vocabulary.index_of("cp=2.0"), rm::VocabularyError);
}

TEST(Discretize, BinningJsonRoundTrip) {
  const auto spec = rm::default_clinical_binning();
  const auto back = rm::binning_from_json(rm::to_json(spec));
  EXPECT_EQ(rm::to_json(back), rm::to_json(spec));
  EXPECT_TRUE(std::isinf(back.continuous.back().lower));
}

TEST(Transaction, RejectsDuplicateFeature) {
  EXPECT_THROW(rm::Transaction({{"a", "1"}, {"a", "2"}}), std::invalid_argument);
}

TEST(FpGrowth, WorkedExample) {
  const std::vector<std::vector<std::string>> t = {{"A", "B"}, {"A", "B"}, {"A", "C"}};
  const auto got = rm::fp_growth(t, {0.6, 0});
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].items, (std::vector<std::string>{"A"}));
  EXPECT_DOUBLE_EQ(got[0].support, 1.0);
  EXPECT_EQ(got[1].items, (std::vector<std::string>{"A", "B"}));
  EXPECT_DOUBLE_EQ(got[1].support, 2.0 / 3.0);
  EXPECT_EQ(got[2].items, (std::vector<std::string>{"B"}));
  EXPECT_DOUBLE_EQ(got[2].support, 2.0 / 3.0);
}

TEST(FpGrowth, EdgeCases) {
  auto all = rm::fp_growth({{"A", "B"}, {"A", "B"}}, {1.0, 0});
  ASSERT_EQ(all.size(), 3u);
  for (const auto& fi : all) EXPECT_DOUBLE_EQ(fi.support, 1.0);

  // max single-item support is 2/3
  EXPECT_TRUE(rm::fp_growth({{"A", "B"}, {"A", "B"}, {"A", "C"}, {"B"}}, {0.76, 0}).empty());
  EXPECT_TRUE(rm::fp_growth({}, {0.5, 0}).empty());
  EXPECT_THROW(rm::fp_growth({{"A"}}, {0.0, 0}), std::invalid_argument);
  EXPECT_THROW(rm::fp_growth({{"A"}}, {1.01, 0}), std::invalid_argument);
}

TEST(FpGrowth, MatchesPowersetOracle) {
  RngStream rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t items = 3 + rng.below(8);
    const std::size_t count = 1 + rng.below(120);
    const auto t = rijepa::oracle::random_transactions(rng, items, count);
    const double min_sup = rng.uniform(0.02, 0.6);
    EXPECT_EQ(rm::fp_growth(t, {min_sup, 0}), rijepa::oracle::powerset_itemsets(t, min_sup))
        << "trial " << trial;
  }
}

TEST(FpGrowth, AntiMonotone) {
  RngStream rng(7);
  const auto t = rijepa::oracle::random_transactions(rng, 10, 150);
  const auto sets = rm::fp_growth(t, {0.05, 0});
  std::map<std::vector<std::string>, double> sup;
  for (const auto& fi : sets) sup[fi.items] = fi.support;
  for (const auto& fi : sets) {
    for (std::size_t drop = 0; drop < fi.items.size() && fi.items.size() > 1; ++drop) {
      auto sub = fi.items;
      sub.erase(sub.begin() + static_cast<long>(drop));
      ASSERT_TRUE(sup.count(sub));
      EXPECT_GE(sup[sub], fi.support);
    }
  }
}

TEST(FpGrowth, MaxLengthTruncates) {
  RngStream rng(9);
  const auto t = rijepa::oracle::random_transactions(rng, 8, 80);
  auto full = rm::fp_growth(t, {0.05, 0});
  auto capped = rm::fp_growth(t, {0.05, 2});
  full.erase(std::remove_if(full.begin(), full.end(), [](const auto& f) { return f.items.size() > 2; }),
             full.end());
  EXPECT_EQ(capped, full);
}

TEST(FpTree, Invariants) {
  RngStream rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<rm::FpTree::WeightedPath> paths;
    for (int i = 0; i < 60; ++i) {
      std::vector<int> items;
      for (int k = 0; k < 9; ++k)
        if (rng.bernoulli(0.4)) items.push_back(k);
      paths.emplace_back(items, 1 + rng.below(3));
    }
    rm::FpTree tree(paths, 5);
    EXPECT_TRUE(tree.check_invariants());
    for (std::size_t i = 1; i < tree.header().size(); ++i)
      EXPECT_GE(tree.header()[i - 1].count, tree.header()[i].count);
  }
}

TEST(MinSupportCount, Rounding) {
  EXPECT_EQ(rm::min_support_count(0.6, 3), 2u);
  EXPECT_EQ(rm::min_support_count(0.04, 237), 10u);
  EXPECT_EQ(rm::min_support_count(0.5, 4), 2u);
  EXPECT_EQ(rm::min_support_count(1e-9, 4), 1u);
}

TEST(Rules, ConfidenceFromItemsets) {
  const std::vector<rm::FrequentItemset> sets = {
      {{"A=1"}, 3, 1.0}, {{"A=1", "B=1"}, 2, 2.0 / 3.0}, {{"B=1"}, 2, 2.0 / 3.0}};
  const auto rules = rm::generate_rules(sets, {0.5, 4}, [](const std::string& t) { return t == "B=1"; });
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rm::logic_text(rules[0]), "IF A=1 THEN B=1");
  EXPECT_DOUBLE_EQ(rules[0].stats.confidence, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rules[0].stats.support, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rules[0].stats.lift, 1.0);

  // B=1 -> A=1 has confidence 1
  EXPECT_EQ(rm::generate_rules(sets, {0.7, 4}, [](const std::string&) { return true; }).size(), 1u);
  EXPECT_THROW(rm::generate_rules(sets, {0.0, 4}, rm::risk_consequent_filter()), std::invalid_argument);
}

TEST(Rules, AgreeWithDirectCounts) {
  RngStream rng(11);
  auto raw = rijepa::oracle::random_transactions(rng, 7, 100);
  std::vector<rm::Transaction> txs;
  for (auto& t : raw) {
    std::vector<rm::Item> items;
    for (auto& tok : t) items.push_back({tok, "1"});
    items.push_back({"target_risk", rng.bernoulli(0.5) ? "1.0" : "0.0"});
    txs.emplace_back(items);
  }
  std::vector<std::vector<std::string>> tokens;
  for (const auto& t : txs) tokens.push_back(t.tokens());
  const auto rules =
      rm::generate_rules(rm::fp_growth(tokens, {0.05, 0}), {0.6, 3}, rm::risk_consequent_filter());
  ASSERT_FALSE(rules.empty());
  rm::TransactionIndex index(txs);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    EXPECT_LE(r.antecedent_size(), 3u);
    EXPECT_NEAR(r.stats.confidence, index.confidence(r.antecedent_tokens(), r.consequent_tokens()), 1e-12);
    auto all = r.antecedent_tokens();
    all.push_back(r.consequent_tokens()[0]);
    EXPECT_NEAR(r.stats.support, index.support(all), 1e-12);
    EXPECT_NEAR(r.stats.lift, r.stats.confidence / index.support(r.consequent_tokens()), 1e-12);
    EXPECT_GE(r.stats.confidence, 0.6 - 1e-12);
    EXPECT_EQ(r.operators.size(), r.features.size() - 1);
    if (i > 0) {
      EXPECT_GE(rules[i - 1].stats.confidence, r.stats.confidence);
    }
  }
}

TEST(CorruptRule, FlipsAndIsInvolution) {
  RngStream rng(1);
  auto rule = rm::RuleTuple::conjunction({{"cp", "4.0"}, {"slope", "3.0"}}, {{"target_risk", "1.0"}});
  auto bad = rm::corrupt_rule(rule, rng);
  EXPECT_EQ(bad.consequent_tokens(), (std::vector<std::string>{"target_risk=0.0"}));
  EXPECT_EQ(bad.antecedent_tokens(), rule.antecedent_tokens());
  EXPECT_EQ(rm::corrupt_rule(bad, rng).consequent_tokens(), rule.consequent_tokens());

  auto no_risk = rm::RuleTuple::conjunction({{"cp", "4.0"}}, {{"exang", "1.0"}});
  EXPECT_THROW(rm::corrupt_rule(no_risk, rng), std::invalid_argument);
}

TEST(CorruptRule, NeverProducesAMinedRule) {
  // With min_confidence > 0.5 a rule and its flip cannot both be mined.
  RngStream rng(5);
  auto raw = rijepa::oracle::random_transactions(rng, 6, 80);
  std::vector<std::vector<std::string>> tokens;
  for (auto& t : raw) {
    t.push_back(rng.bernoulli(0.4) ? rm::kHighRisk : rm::kLowRisk);
    std::vector<std::string> renamed;
    for (auto& tok : t) renamed.push_back(tok.find('=') == std::string::npos ? tok + "=1" : tok);
    tokens.push_back(renamed);
  }
  const auto rules =
      rm::generate_rules(rm::fp_growth(tokens, {0.04, 0}), {0.7, 4}, rm::risk_consequent_filter());
  std::set<std::string> mined;
  for (const auto& r : rules) mined.insert(rm::logic_text(r));
  for (const auto& r : rules) EXPECT_FALSE(mined.count(rm::logic_text(rm::corrupt_rule(r, rng))));
}

TEST(RuleTuple, ValidateCatchesShapeErrors) {
  auto r = rm::RuleTuple::conjunction({{"a", "1"}, {"b", "2"}}, {{"target_risk", "1.0"}}, {0.2, 0.9, 1.5});
  EXPECT_NO_THROW(r.validate());
  auto bad = r;
  bad.operators.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = r;
  bad.stats.confidence = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = r;
  bad.membership = std::vector<double>{0.5};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(RuleIo, TextRoundTrip) {
  auto r = rm::RuleTuple::conjunction({{"cp", "4.0"}, {"slope", "3.0"}}, {{"target_risk", "1.0"}},
                                      {0.0421941, 1.0, 2.17});
  const auto line = rm::format_rule(r);
  EXPECT_EQ(line, "IF cp=4.0 AND slope=3.0 THEN target_risk=1.0 | sup=0.0421941 conf=1 lift=2.17");
  const auto back = rm::parse_rule(line);
  EXPECT_TRUE(back.same_logic(r));
  EXPECT_DOUBLE_EQ(back.stats.support, 0.0421941);
  EXPECT_EQ(rm::format_rule(back), line);

  rm::RuleTuple mixed = r;
  mixed.predicates[1] = rm::Predicate::Ge;
  mixed.operators[0] = rm::LogicOp::Or;
  EXPECT_EQ(rm::logic_text(rm::parse_rule(rm::format_rule(mixed))), rm::logic_text(mixed));
  EXPECT_THROW(rm::parse_rule("cp=4.0 THEN x=1"), std::invalid_argument);
}

TEST(RuleIo, JsonAndFileRoundTrip) {
  auto r = rm::RuleTuple::conjunction({{"age_group", "Middle"}, {"thalach_level", "High"}},
                                      {{"target_risk", "0.0"}}, {0.15, 0.738, 1.36});
  r.membership = std::vector<double>{0.9, 0.4};
  const auto j = rm::rule_to_json(r);
  const auto back = rm::rule_from_json(j);
  EXPECT_TRUE(back.same_logic(r));
  EXPECT_EQ(*back.membership, *r.membership);

  const auto dir = std::filesystem::temp_directory_path() / "rijepa_rule_io";
  std::filesystem::create_directories(dir);
  rm::write_rules_json(dir / "rules.json", {r, r});
  EXPECT_EQ(rm::read_rules_json(dir / "rules.json").size(), 2u);
  rm::write_rules_text(dir / "rules.txt", {r});
  EXPECT_TRUE(rm::read_rules_text(dir / "rules.txt")[0].same_logic(r));
  std::filesystem::remove_all(dir);
}
