#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/rulemine/rule.hpp"

namespace rijepa::rulemine {

class BinningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Upper edge of one bin. A value v falls in the first bin with
// v < upper (or v <= upper when inclusive).
struct BinEdge {
  std::string label;
  double upper = std::numeric_limits<double>::infinity();
  bool inclusive = false;
};

struct ContinuousBinning {
  std::string column;   // raw column name, e.g. "age"
  std::string feature;  // emitted feature, e.g. "age_group"
  double lower = -std::numeric_limits<double>::infinity();
  std::vector<BinEdge> bins;

  // Throws BinningError naming the feature when v is outside every bin.
  std::string label_for(double v) const;
};

struct BinningSpec {
  std::vector<ContinuousBinning> continuous;
  // Columns passed through as column=value with one decimal (cp=4.0).
  std::vector<std::string> categorical;
};

// Age, resting blood pressure, cholesterol, max heart rate and ST depression
// cut at standard clinical thresholds; all other Cleveland columns categorical.
BinningSpec default_clinical_binning();

nlohmann::json to_json(const BinningSpec& spec);
BinningSpec binning_from_json(const nlohmann::json& j);

struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;
};

struct Discretized {
  std::vector<Transaction> transactions;
  Vocabulary vocabulary;
};

std::string format_category(double v);

Discretized discretize(const RawTable& table, const BinningSpec& spec);

}  // namespace rijepa::rulemine
