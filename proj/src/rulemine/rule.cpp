#include "rijepa/rulemine/rule.hpp"

#include <algorithm>

namespace rijepa::rulemine {

Item Item::parse(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
    throw VocabularyError("malformed item token '" + token + "'");
  }
  return {token.substr(0, eq), token.substr(eq + 1)};
}

Transaction::Transaction(std::vector<Item> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (items_[i].feature == items_[i - 1].feature) {
      throw std::invalid_argument("transaction has two items for feature '" + items_[i].feature +
                                  "'");
    }
  }
}

std::vector<std::string> Transaction::tokens() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& it : items_) out.push_back(it.token());
  return out;
}

bool Transaction::contains(const std::string& token) const {
  return std::any_of(items_.begin(), items_.end(),
                     [&](const Item& it) { return it.token() == token; });
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

std::size_t Vocabulary::index_of(const std::string& token) const {
  auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end() || *it != token) {
    throw VocabularyError("token '" + token + "' is not in the vocabulary");
  }
  return static_cast<std::size_t>(it - tokens_.begin());
}

bool Vocabulary::contains(const std::string& token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

std::string to_string(Predicate p) {
  switch (p) {
    case Predicate::Eq: return "=";
    case Predicate::Lt: return "<";
    case Predicate::Le: return "<=";
    case Predicate::Gt: return ">";
    case Predicate::Ge: return ">=";
  }
  return "?";
}

std::string to_string(LogicOp op) {
  switch (op) {
    case LogicOp::And: return "AND";
    case LogicOp::Or: return "OR";
    case LogicOp::Not: return "NOT";
  }
  return "?";
}

Predicate parse_predicate(const std::string& s) {
  if (s == "=") return Predicate::Eq;
  if (s == "<") return Predicate::Lt;
  if (s == "<=") return Predicate::Le;
  if (s == ">") return Predicate::Gt;
  if (s == ">=") return Predicate::Ge;
  throw std::invalid_argument("unknown predicate '" + s + "'");
}

LogicOp parse_logic_op(const std::string& s) {
  if (s == "AND") return LogicOp::And;
  if (s == "OR") return LogicOp::Or;
  if (s == "NOT") return LogicOp::Not;
  throw std::invalid_argument("unknown logical operator '" + s + "'");
}

RuleTuple RuleTuple::conjunction(const std::vector<Item>& antecedent, std::vector<Item> consequent,
                                 RuleStats stats) {
  RuleTuple r;
  for (const auto& it : antecedent) {
    r.features.push_back(it.feature);
    r.predicates.push_back(Predicate::Eq);
    r.thresholds.push_back(it.value);
  }
  if (!antecedent.empty()) r.operators.assign(antecedent.size() - 1, LogicOp::And);
  r.consequent = std::move(consequent);
  r.stats = stats;
  return r;
}

std::vector<Item> RuleTuple::antecedent_items() const {
  std::vector<Item> out;
  for (std::size_t i = 0; i < features.size(); ++i) out.push_back({features[i], thresholds[i]});
  return out;
}

std::vector<std::string> RuleTuple::antecedent_tokens() const {
  std::vector<std::string> out;
  for (const auto& it : antecedent_items()) out.push_back(it.token());
  return out;
}

std::vector<std::string> RuleTuple::consequent_tokens() const {
  std::vector<std::string> out;
  for (const auto& it : consequent) out.push_back(it.token());
  return out;
}

void RuleTuple::validate() const {
  if (features.size() != predicates.size() || features.size() != thresholds.size()) {
    throw std::invalid_argument("rule: |X|, |Phi| and |Theta| differ");
  }
  const std::size_t expected_ops = features.empty() ? 0 : features.size() - 1;
  if (operators.size() != expected_ops) {
    throw std::invalid_argument("rule: operator list must have |X|-1 entries");
  }
  if (membership && membership->size() != features.size()) {
    throw std::invalid_argument("rule: membership degrees must match |X|");
  }
  if (stats.support < 0.0 || stats.support > 1.0) {
    throw std::invalid_argument("rule: support outside [0, 1]");
  }
  if (stats.confidence < 0.0 || stats.confidence > 1.0) {
    throw std::invalid_argument("rule: confidence outside [0, 1]");
  }
}

bool RuleTuple::same_logic(const RuleTuple& other) const {
  return features == other.features && predicates == other.predicates &&
         thresholds == other.thresholds && consequent == other.consequent &&
         operators == other.operators;
}

}  // namespace rijepa::rulemine
