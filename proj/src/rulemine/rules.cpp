#include "rijepa/rulemine/rules.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rijepa/rulemine/rule_io.hpp"

namespace rijepa::rulemine {

ConsequentFilter risk_consequent_filter() {
  return [](const std::string& token) { return token == kHighRisk || token == kLowRisk; };
}

std::vector<RuleTuple> generate_rules(const std::vector<FrequentItemset>& itemsets,
                                      const RuleOptions& options, const ConsequentFilter& filter) {
  if (!(options.min_confidence > 0.0) || options.min_confidence > 1.0) {
    throw std::invalid_argument("generate_rules: min_confidence must lie in (0, 1]");
  }
  std::map<std::vector<std::string>, double> support;
  for (const auto& fi : itemsets) support.emplace(fi.items, fi.support);

  auto lookup = [&](const std::vector<std::string>& items) {
    auto it = support.find(items);
    if (it == support.end()) {
      throw std::invalid_argument("generate_rules: itemsets are not downward closed");
    }
    return it->second;
  };

  std::vector<RuleTuple> rules;
  for (const auto& fi : itemsets) {
    if (fi.items.size() < 2) continue;
    if (options.max_antecedent != 0 && fi.items.size() - 1 > options.max_antecedent) continue;
    for (std::size_t k = 0; k < fi.items.size(); ++k) {
      const std::string& consequent = fi.items[k];
      if (!filter(consequent)) continue;
      std::vector<std::string> antecedent;
      antecedent.reserve(fi.items.size() - 1);
      for (std::size_t j = 0; j < fi.items.size(); ++j)
        if (j != k) antecedent.push_back(fi.items[j]);

      const double confidence = fi.support / lookup(antecedent);
      if (confidence + 1e-12 < options.min_confidence) continue;
      const double lift = confidence / lookup({consequent});

      std::vector<Item> ante_items;
      for (const auto& tok : antecedent) ante_items.push_back(Item::parse(tok));
      rules.push_back(RuleTuple::conjunction(ante_items, {Item::parse(consequent)},
                                             {fi.support, std::min(confidence, 1.0), lift}));
    }
  }

  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) keys.emplace_back(logic_text(rules[i]), i);
  std::vector<std::size_t> order(rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = rules[a].stats;
    const auto& rb = rules[b].stats;
    if (ra.confidence != rb.confidence) return ra.confidence > rb.confidence;
    if (ra.support != rb.support) return ra.support > rb.support;
    return keys[a].first < keys[b].first;
  });
  std::vector<RuleTuple> sorted;
  sorted.reserve(rules.size());
  for (std::size_t i : order) sorted.push_back(std::move(rules[i]));
  return sorted;
}

RuleTuple corrupt_rule(const RuleTuple& rule, RngStream& rng,
                       const std::vector<std::string>& outcome_values) {
  auto it = std::find_if(rule.consequent.begin(), rule.consequent.end(),
                         [](const Item& item) { return item.feature == kRiskFeature; });
  if (it == rule.consequent.end()) {
    throw std::invalid_argument("corrupt_rule: rule has no target_risk consequent");
  }
  std::vector<std::string> alternatives;
  for (const auto& v : outcome_values)
    if (v != it->value) alternatives.push_back(v);
  if (alternatives.empty()) throw std::invalid_argument("corrupt_rule: no alternative outcome");

  RuleTuple out = rule;
  const std::size_t pick = alternatives.size() == 1 ? 0 : rng.below(alternatives.size());
  out.consequent[static_cast<std::size_t>(it - rule.consequent.begin())].value = alternatives[pick];
  return out;
}

TransactionIndex::TransactionIndex(std::vector<Transaction> transactions)
    : transactions_(std::move(transactions)) {
  token_sets_.reserve(transactions_.size());
  for (const auto& t : transactions_) {
    auto tokens = t.tokens();
    std::sort(tokens.begin(), tokens.end());
    token_sets_.push_back(std::move(tokens));
  }
}

std::size_t TransactionIndex::count(const std::vector<std::string>& tokens) const {
  std::vector<std::string> wanted = tokens;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  std::size_t n = 0;
  for (const auto& set : token_sets_)
    if (std::includes(set.begin(), set.end(), wanted.begin(), wanted.end())) ++n;
  return n;
}

double TransactionIndex::support(const std::vector<std::string>& tokens) const {
  if (transactions_.empty()) return 0.0;
  return static_cast<double>(count(tokens)) / static_cast<double>(transactions_.size());
}

double TransactionIndex::confidence(const std::vector<std::string>& antecedent,
                                    const std::vector<std::string>& consequent) const {
  const std::size_t a = count(antecedent);
  if (a == 0) return 0.0;
  std::vector<std::string> both = antecedent;
  both.insert(both.end(), consequent.begin(), consequent.end());
  return static_cast<double>(count(both)) / static_cast<double>(a);
}

}  // namespace rijepa::rulemine
