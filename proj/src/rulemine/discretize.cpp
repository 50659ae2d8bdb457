#include "rijepa/rulemine/discretize.hpp"

#include <cmath>
#include <cstdio>

namespace rijepa::rulemine {

std::string ContinuousBinning::label_for(double v) const {
  if (std::isfinite(v) && v >= lower) {
    for (const auto& b : bins) {
      if (v < b.upper || (b.inclusive && v == b.upper)) return b.label;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  throw BinningError("value " + std::string(buf) + " of '" + column +
                     "' falls outside every bin of feature '" + feature + "'");
}

BinningSpec default_clinical_binning() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BinningSpec spec;
  spec.continuous = {
      {"age", "age_group", 0.0, {{"Young", 45.0}, {"Middle", 60.0}, {"Senior", inf}}},
      {"trestbps", "trestbps_level", 0.0, {{"Normal", 130.0}, {"Elevated", 160.0}, {"High", inf}}},
      {"chol", "chol_level", 0.0, {{"Normal", 200.0}, {"Borderline", 240.0}, {"High", inf}}},
      {"thalach", "thalach_level", 0.0, {{"Low", 120.0}, {"Medium", 160.0}, {"High", inf}}},
      {"oldpeak", "oldpeak_level", -inf,
       {{"None", 0.0, true}, {"Mild", 2.0, true}, {"Severe", inf}}},
  };
  spec.categorical = {"sex", "cp", "fbs", "restecg", "exang", "slope", "ca", "thal", "target_risk"};
  return spec;
}

namespace {

nlohmann::json edge_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double edge_from(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw BinningError("bad bin edge '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

nlohmann::json to_json(const BinningSpec& spec) {
  nlohmann::json j;
  j["continuous"] = nlohmann::json::array();
  for (const auto& c : spec.continuous) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : c.bins) {
      bins.push_back({{"label", b.label}, {"upper", edge_value(b.upper)}, {"inclusive", b.inclusive}});
    }
    j["continuous"].push_back(
        {{"column", c.column}, {"feature", c.feature}, {"lower", edge_value(c.lower)}, {"bins", bins}});
  }
  j["categorical"] = spec.categorical;
  return j;
}

BinningSpec binning_from_json(const nlohmann::json& j) {
  BinningSpec spec;
  for (const auto& c : j.at("continuous")) {
    ContinuousBinning cb;
    cb.column = c.at("column").get<std::string>();
    cb.feature = c.at("feature").get<std::string>();
    cb.lower = c.contains("lower") ? edge_from(c.at("lower"))
                                   : -std::numeric_limits<double>::infinity();
    for (const auto& b : c.at("bins")) {
      cb.bins.push_back({b.at("label").get<std::string>(), edge_from(b.at("upper")),
                         b.value("inclusive", false)});
    }
    spec.continuous.push_back(std::move(cb));
  }
  spec.categorical = j.at("categorical").get<std::vector<std::string>>();
  return spec;
}

std::size_t RawTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw BinningError("binning refers to unknown column '" + name + "'");
}

std::string format_category(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

Discretized discretize(const RawTable& table, const BinningSpec& spec) {
  struct Column {
    std::size_t index;
    const ContinuousBinning* binning;
    std::string name;
  };
  std::vector<Column> cols;
  for (const auto& c : spec.continuous) cols.push_back({table.column_index(c.column), &c, c.feature});
  for (const auto& c : spec.categorical) cols.push_back({table.column_index(c), nullptr, c});

  Discretized out;
  std::vector<std::string> tokens;
  out.transactions.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<Item> items;
    items.reserve(cols.size());
    for (const auto& c : cols) {
      const double v = row.at(c.index);
      if (c.binning) {
        items.push_back({c.name, c.binning->label_for(v)});
      } else {
        if (!std::isfinite(v)) throw BinningError("non-finite value in categorical '" + c.name + "'");
        items.push_back({c.name, format_category(v)});
      }
      tokens.push_back(items.back().token());
    }
    out.transactions.emplace_back(std::move(items));
  }
  out.vocabulary = Vocabulary(std::move(tokens));
  return out;
}

}  // namespace rijepa::rulemine
