#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/numcore/rng.hpp"
#include "rijepa/rulemine/discretize.hpp"

namespace rijepa::experiments {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<const char*, 14> kClevelandColumns{
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
    "thalach", "exang", "oldpeak", "slope", "ca", "thal", "num"};

struct PatientRecord {
  double age = 0, sex = 0, cp = 0, trestbps = 0, chol = 0, fbs = 0, restecg = 0;
  double thalach = 0, exang = 0, oldpeak = 0, slope = 0, ca = 0, thal = 0;
  int num = 0;
  int target = 0;  // num > 0

  // The 13 measured attributes in file order.
  std::array<double, 13> attributes() const;
};

struct ClevelandData {
  std::vector<PatientRecord> records;
  std::size_t raw_rows = 0;
  std::size_t dropped_missing = 0;
};

// Rows with '?' are dropped. Codes are checked against their documented
// domains. Errors name the 1-based line.
ClevelandData load_cleveland(const std::filesystem::path& path);
ClevelandData parse_cleveland(const std::string& text);

std::vector<int> labels(const std::vector<PatientRecord>& records);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, a shuffled round(fraction·n_class) go to train. Indices sorted.
SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction, RngStream rng);

template <typename T>
std::vector<T> select(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v.at(i));
  return out;
}

// z-scores the continuous columns with training statistics; binary columns
// stay 0/1; multi-valued categoricals are one-hot.
struct FeatureEncoder {
  std::array<double, 5> mean{};
  std::array<double, 5> sd{};

  static FeatureEncoder fit(const std::vector<PatientRecord>& train);
  Tensor encode(const std::vector<PatientRecord>& records) const;
  std::vector<double> encode(const PatientRecord& r) const;
  static std::vector<std::string> feature_names();
  static std::size_t width();

  nlohmann::json to_json() const;
  static FeatureEncoder from_json(const nlohmann::json& j);
};

// Columns of the 13 attributes plus target_risk, ready for discretization.
rulemine::RawTable raw_table(const std::vector<PatientRecord>& records);

}  // namespace rijepa::experiments
