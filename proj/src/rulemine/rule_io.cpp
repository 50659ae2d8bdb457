#include "rijepa/rulemine/rule_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rijepa/numcore/format.hpp"

namespace rijepa::rulemine {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "a=v AND b<w OR c=x" on connective keywords.
void split_conditions(const std::string& text, std::vector<std::string>& parts,
                      std::vector<LogicOp>& ops) {
  std::istringstream in(text);
  std::string word, current;
  while (in >> word) {
    if (word == "AND" || word == "OR" || word == "NOT") {
      parts.push_back(trim(current));
      ops.push_back(parse_logic_op(word));
      current.clear();
    } else {
      current += (current.empty() ? "" : " ") + word;
    }
  }
  parts.push_back(trim(current));
}

void parse_condition(const std::string& cond, std::string& feature, Predicate& pred,
                     std::string& value) {
  static const char* const kOps[] = {">=", "<=", "=", "<", ">"};
  for (const char* op : kOps) {
    const auto pos = cond.find(op);
    if (pos != std::string::npos && pos > 0) {
      feature = trim(cond.substr(0, pos));
      pred = parse_predicate(op);
      value = trim(cond.substr(pos + std::char_traits<char>::length(op)));
      if (!value.empty()) return;
    }
  }
  throw std::invalid_argument("cannot parse rule condition '" + cond + "'");
}

double parse_stat(const std::string& stats, const std::string& key) {
  const auto pos = stats.find(key + "=");
  if (pos == std::string::npos) throw std::invalid_argument("rule line lacks '" + key + "='");
  return std::stod(stats.substr(pos + key.size() + 1));
}

}  // namespace

std::string logic_text(const RuleTuple& rule) {
  std::string out = "IF ";
  if (rule.features.empty()) out += "*";
  for (std::size_t i = 0; i < rule.features.size(); ++i) {
    if (i > 0) out += " " + to_string(rule.operators.at(i - 1)) + " ";
    out += rule.features[i] + to_string(rule.predicates[i]) + rule.thresholds[i];
  }
  out += " THEN ";
  for (std::size_t i = 0; i < rule.consequent.size(); ++i) {
    if (i > 0) out += " AND ";
    out += rule.consequent[i].token();
  }
  return out;
}

std::string format_rule(const RuleTuple& rule) {
  return logic_text(rule) + " | sup=" + format_number(rule.stats.support) +
         " conf=" + format_number(rule.stats.confidence) + " lift=" + format_number(rule.stats.lift);
}

RuleTuple parse_rule(const std::string& line) {
  const std::string text = trim(line);
  if (text.rfind("IF ", 0) != 0) throw std::invalid_argument("rule line must start with IF");
  const auto then = text.find(" THEN ");
  if (then == std::string::npos) throw std::invalid_argument("rule line lacks THEN");
  const auto bar = text.find(" | ", then);

  RuleTuple rule;
  const std::string ante = trim(text.substr(3, then - 3));
  if (ante != "*") {
    std::vector<std::string> parts;
    split_conditions(ante, parts, rule.operators);
    for (const auto& p : parts) {
      std::string f, v;
      Predicate pred;
      parse_condition(p, f, pred, v);
      rule.features.push_back(f);
      rule.predicates.push_back(pred);
      rule.thresholds.push_back(v);
    }
  }
  const std::string cons =
      trim(text.substr(then + 6, bar == std::string::npos ? std::string::npos : bar - then - 6));
  std::vector<std::string> parts;
  std::vector<LogicOp> ops;
  split_conditions(cons, parts, ops);
  for (const auto& p : parts) rule.consequent.push_back(Item::parse(p));

  if (bar != std::string::npos) {
    const std::string stats = text.substr(bar + 3);
    rule.stats = {parse_stat(stats, "sup"), parse_stat(stats, "conf"), parse_stat(stats, "lift")};
  }
  rule.validate();
  return rule;
}

nlohmann::json rule_to_json(const RuleTuple& rule) {
  nlohmann::json j;
  j["features"] = rule.features;
  std::vector<std::string> preds, ops;
  for (auto p : rule.predicates) preds.push_back(to_string(p));
  for (auto o : rule.operators) ops.push_back(to_string(o));
  j["predicates"] = preds;
  j["thresholds"] = rule.thresholds;
  j["consequent"] = rule.consequent_tokens();
  j["membership"] = rule.membership ? nlohmann::json(*rule.membership) : nlohmann::json(nullptr);
  j["operators"] = ops;
  j["stats"] = {{"support", rule.stats.support},
                {"confidence", rule.stats.confidence},
                {"lift", rule.stats.lift}};
  return j;
}

RuleTuple rule_from_json(const nlohmann::json& j) {
  RuleTuple r;
  r.features = j.at("features").get<std::vector<std::string>>();
  for (const auto& p : j.at("predicates")) r.predicates.push_back(parse_predicate(p.get<std::string>()));
  r.thresholds = j.at("thresholds").get<std::vector<std::string>>();
  for (const auto& t : j.at("consequent")) r.consequent.push_back(Item::parse(t.get<std::string>()));
  if (j.contains("membership") && !j.at("membership").is_null()) {
    r.membership = j.at("membership").get<std::vector<double>>();
  }
  for (const auto& o : j.at("operators")) r.operators.push_back(parse_logic_op(o.get<std::string>()));
  const auto& s = j.at("stats");
  r.stats = {s.at("support").get<double>(), s.at("confidence").get<double>(),
             s.at("lift").get<double>()};
  r.validate();
  return r;
}

void write_rules_text(const std::filesystem::path& path, const std::vector<RuleTuple>& rules) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rules) out << format_rule(r) << '\n';
}

std::vector<RuleTuple> read_rules_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<RuleTuple> rules;
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) rules.push_back(parse_rule(line));
  return rules;
}

void write_rules_json(const std::filesystem::path& path, const std::vector<RuleTuple>& rules) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rules) j.push_back(rule_to_json(r));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

std::vector<RuleTuple> read_rules_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  std::vector<RuleTuple> rules;
  for (const auto& r : j) rules.push_back(rule_from_json(r));
  return rules;
}

void write_transactions_csv(const std::filesystem::path& path,
                            const std::vector<Transaction>& transactions) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : transactions) {
    const auto tokens = t.tokens();
    for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? "," : "") << tokens[i];
    out << '\n';
  }
}

}  // namespace rijepa::rulemine
