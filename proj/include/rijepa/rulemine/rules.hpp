#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rijepa/numcore/rng.hpp"
#include "rijepa/rulemine/fp_growth.hpp"
#include "rijepa/rulemine/rule.hpp"

namespace rijepa::rulemine {

inline constexpr const char* kRiskFeature = "target_risk";
inline constexpr const char* kHighRisk = "target_risk=1.0";
inline constexpr const char* kLowRisk = "target_risk=0.0";

using ConsequentFilter = std::function<bool(const std::string& token)>;

// Accepts the two risk poles as single-item consequents.
ConsequentFilter risk_consequent_filter();

struct RuleOptions {
  double min_confidence = 0.70;
  // Longest antecedent; 0 means unbounded.
  std::size_t max_antecedent = 4;
};

// All single-consequent rules A → c with c accepted by the filter and
// sup(A ∪ c) / sup(A) >= min_confidence. Itemsets must be downward closed
// (as returned by fp_growth). Ordered by confidence desc, support desc, text.
std::vector<RuleTuple> generate_rules(const std::vector<FrequentItemset>& itemsets,
                                      const RuleOptions& options, const ConsequentFilter& filter);

// Replaces the risk consequent by a different value of the same feature drawn
// from outcome_values; with two outcomes the flip is forced.
RuleTuple corrupt_rule(const RuleTuple& rule, RngStream& rng,
                       const std::vector<std::string>& outcome_values = {"0.0", "1.0"});

// Support and confidence of arbitrary rules measured directly on transactions.
class TransactionIndex {
 public:
  explicit TransactionIndex(std::vector<Transaction> transactions);

  std::size_t size() const { return transactions_.size(); }
  const std::vector<Transaction>& transactions() const { return transactions_; }
  std::size_t count(const std::vector<std::string>& tokens) const;
  double support(const std::vector<std::string>& tokens) const;
  // sup(A ∪ C) / sup(A); 0 when A never occurs.
  double confidence(const std::vector<std::string>& antecedent,
                    const std::vector<std::string>& consequent) const;

 private:
  std::vector<Transaction> transactions_;
  std::vector<std::vector<std::string>> token_sets_;
};

}  // namespace rijepa::rulemine
