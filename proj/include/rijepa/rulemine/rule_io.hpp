#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/rulemine/rule.hpp"

namespace rijepa::rulemine {

// "IF a=v AND b=w THEN target_risk=r" (antecedent "*" when empty).
std::string logic_text(const RuleTuple& rule);
// logic_text + " | sup=s conf=c lift=l" with 6 significant digits.
std::string format_rule(const RuleTuple& rule);
RuleTuple parse_rule(const std::string& line);

nlohmann::json rule_to_json(const RuleTuple& rule);
RuleTuple rule_from_json(const nlohmann::json& j);

void write_rules_text(const std::filesystem::path& path, const std::vector<RuleTuple>& rules);
std::vector<RuleTuple> read_rules_text(const std::filesystem::path& path);
void write_rules_json(const std::filesystem::path& path, const std::vector<RuleTuple>& rules);
std::vector<RuleTuple> read_rules_json(const std::filesystem::path& path);

// One transaction per line, tokens comma-separated.
void write_transactions_csv(const std::filesystem::path& path,
                            const std::vector<Transaction>& transactions);

}  // namespace rijepa::rulemine
