#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rijepa::rulemine {

class VocabularyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// feature=value token, e.g. age_group=Middle or cp=4.0.
struct Item {
  std::string feature;
  std::string value;

  std::string token() const { return feature + "=" + value; }
  static Item parse(const std::string& token);

  friend auto operator<=>(const Item&, const Item&) = default;
};

// At most one item per feature; items kept sorted by feature name.
class Transaction {
 public:
  Transaction() = default;
  explicit Transaction(std::vector<Item> items);

  const std::vector<Item>& items() const { return items_; }
  std::vector<std::string> tokens() const;
  bool contains(const std::string& token) const;

 private:
  std::vector<Item> items_;
};

// Sorted set of every token seen during discretization.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::size_t index_of(const std::string& token) const;  // throws VocabularyError
  bool contains(const std::string& token) const;

 private:
  std::vector<std::string> tokens_;
};

enum class Predicate { Eq, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or, Not };

std::string to_string(Predicate p);
std::string to_string(LogicOp op);
Predicate parse_predicate(const std::string& s);
LogicOp parse_logic_op(const std::string& s);

struct RuleStats {
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;
};

// ⟨X, Φ, Θ, Y, μ, Ω, Σ⟩: antecedent features, predicates, thresholds or
// categories, consequent items, optional fuzzy memberships, logical
// operators between antecedent conditions, and rule statistics.
struct RuleTuple {
  std::vector<std::string> features;
  std::vector<Predicate> predicates;
  std::vector<std::string> thresholds;
  std::vector<Item> consequent;
  std::optional<std::vector<double>> membership;
  std::vector<LogicOp> operators;
  RuleStats stats;

  // Conjunctive rule with equality conditions.
  static RuleTuple conjunction(const std::vector<Item>& antecedent, std::vector<Item> consequent,
                               RuleStats stats = {});

  std::size_t antecedent_size() const { return features.size(); }
  // Antecedent as items; only meaningful for equality predicates.
  std::vector<Item> antecedent_items() const;
  std::vector<std::string> antecedent_tokens() const;
  std::vector<std::string> consequent_tokens() const;

  // Throws std::invalid_argument when the tuple invariants do not hold.
  void validate() const;

  bool same_logic(const RuleTuple& other) const;
};

}  // namespace rijepa::rulemine
