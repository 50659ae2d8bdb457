#include "rijepa/experiments/cleveland.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rijepa::experiments {
namespace {

constexpr std::array<const char*, 5> kContinuous{"age", "trestbps", "chol", "thalach", "oldpeak"};
constexpr std::array<const char*, 3> kBinary{"sex", "fbs", "exang"};

struct OneHot {
  const char* name;
  std::vector<double> codes;
};

const std::vector<OneHot>& one_hots() {
  static const std::vector<OneHot> v{{"cp", {1, 2, 3, 4}},
                                     {"restecg", {0, 1, 2}},
                                     {"slope", {1, 2, 3}},
                                     {"ca", {0, 1, 2, 3}},
                                     {"thal", {3, 6, 7}}};
  return v;
}

double field(const PatientRecord& r, const std::string& name) {
  const auto a = r.attributes();
  for (std::size_t i = 0; i < 13; ++i)
    if (name == kClevelandColumns[i]) return a[i];
  throw std::invalid_argument("unknown Cleveland column " + name);
}

void check_domain(double v, std::initializer_list<double> allowed, const char* column, std::size_t line) {
  for (double a : allowed)
    if (v == a) return;
  std::ostringstream msg;
  msg << "line " << line << ": " << column << "=" << v << " is outside its coded domain";
  throw ParseError(msg.str());
}

}  // namespace

std::array<double, 13> PatientRecord::attributes() const {
  return {age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak, slope, ca, thal};
}

ClevelandData parse_cleveland(const std::string& text) {
  ClevelandData out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++out.raw_rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 14 columns, found " +
                       std::to_string(cells.size()));
    }
    if (std::any_of(cells.begin(), cells.end(), [](const std::string& c) { return c.find('?') != std::string::npos; })) {
      ++out.dropped_missing;
      continue;
    }
    std::array<double, 14> v{};
    for (std::size_t i = 0; i < 14; ++i) {
      std::size_t used = 0;
      try {
        v[i] = std::stod(cells[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      const auto rest = cells[i].find_first_not_of(" \t", used);
      if (used == 0 || rest != std::string::npos || !std::isfinite(v[i])) {
        throw ParseError("line " + std::to_string(line_no) + ": column " + kClevelandColumns[i] +
                         " is not a number: '" + cells[i] + "'");
      }
    }
    PatientRecord r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12]};
    check_domain(r.sex, {0, 1}, "sex", line_no);
    check_domain(r.cp, {1, 2, 3, 4}, "cp", line_no);
    check_domain(r.fbs, {0, 1}, "fbs", line_no);
    check_domain(r.restecg, {0, 1, 2}, "restecg", line_no);
    check_domain(r.exang, {0, 1}, "exang", line_no);
    check_domain(r.slope, {1, 2, 3}, "slope", line_no);
    check_domain(r.ca, {0, 1, 2, 3}, "ca", line_no);
    check_domain(r.thal, {3, 6, 7}, "thal", line_no);
    check_domain(v[13], {0, 1, 2, 3, 4}, "num", line_no);
    r.num = static_cast<int>(v[13]);
    r.target = r.num > 0 ? 1 : 0;
    out.records.push_back(r);
  }
  return out;
}

ClevelandData load_cleveland(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cleveland(buf.str());
}

std::vector<int> labels(const std::vector<PatientRecord>& records) {
  std::vector<int> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(r.target);
  return y;
}

SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction, RngStream rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
  }
  std::set<int> classes(labels.begin(), labels.end());
  SplitIndices s;
  for (int c : classes) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) idx.push_back(i);
    rng.shuffle(idx);
    const auto k = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<long>(k));
    s.test.insert(s.test.end(), idx.begin() + static_cast<long>(k), idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

FeatureEncoder FeatureEncoder::fit(const std::vector<PatientRecord>& train) {
  if (train.size() < 2) throw std::invalid_argument("feature scaling needs at least two training rows");
  FeatureEncoder e;
  for (std::size_t c = 0; c < kContinuous.size(); ++c) {
    double s = 0.0, ss = 0.0;
    for (const auto& r : train) s += field(r, kContinuous[c]);
    const double m = s / static_cast<double>(train.size());
    for (const auto& r : train) ss += (field(r, kContinuous[c]) - m) * (field(r, kContinuous[c]) - m);
    e.mean[c] = m;
    e.sd[c] = std::sqrt(ss / static_cast<double>(train.size() - 1));
    if (!(e.sd[c] > 0.0)) throw std::invalid_argument(std::string("feature ") + kContinuous[c] + " is constant");
  }
  return e;
}

std::vector<double> FeatureEncoder::encode(const PatientRecord& r) const {
  std::vector<double> v;
  v.reserve(width());
  for (std::size_t c = 0; c < kContinuous.size(); ++c) v.push_back((field(r, kContinuous[c]) - mean[c]) / sd[c]);
  for (const char* b : kBinary) v.push_back(field(r, b));
  for (const auto& oh : one_hots()) {
    const double x = field(r, oh.name);
    for (double code : oh.codes) v.push_back(x == code ? 1.0 : 0.0);
  }
  return v;
}

Tensor FeatureEncoder::encode(const std::vector<PatientRecord>& records) const {
  Tensor t(records.size(), width());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto row = encode(records[i]);
    std::copy(row.begin(), row.end(), t.row_span(i).begin());
  }
  return t;
}

std::vector<std::string> FeatureEncoder::feature_names() {
  std::vector<std::string> n;
  for (const char* c : kContinuous) n.emplace_back(c);
  for (const char* b : kBinary) n.emplace_back(b);
  for (const auto& oh : one_hots())
    for (double code : oh.codes) {
      std::string name(oh.name);
      name.append("=").append(rulemine::format_category(code));
      n.push_back(std::move(name));
    }
  return n;
}

std::size_t FeatureEncoder::width() { return feature_names().size(); }

nlohmann::json FeatureEncoder::to_json() const {
  nlohmann::json j;
  for (std::size_t c = 0; c < kContinuous.size(); ++c) j[kContinuous[c]] = {{"mean", mean[c]}, {"sd", sd[c]}};
  j["features"] = feature_names();
  return j;
}

FeatureEncoder FeatureEncoder::from_json(const nlohmann::json& j) {
  FeatureEncoder e;
  for (std::size_t c = 0; c < kContinuous.size(); ++c) {
    e.mean[c] = j.at(kContinuous[c]).at("mean").get<double>();
    e.sd[c] = j.at(kContinuous[c]).at("sd").get<double>();
  }
  return e;
}

rulemine::RawTable raw_table(const std::vector<PatientRecord>& records) {
  rulemine::RawTable t;
  for (std::size_t i = 0; i < 13; ++i) t.columns.push_back(kClevelandColumns[i]);
  t.columns.push_back("target_risk");
  for (const auto& r : records) {
    const auto a = r.attributes();
    std::vector<double> row(a.begin(), a.end());
    row.push_back(static_cast<double>(r.target));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace rijepa::experiments
