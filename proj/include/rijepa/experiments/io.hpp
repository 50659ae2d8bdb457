#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa::experiments {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Pulls known keys out of a JSON config object. Absent keys leave the
// target untouched; finish() rejects keys nobody asked for.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string context);

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }
  void finish() const;

 private:
  const nlohmann::json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Comma-separated writer; numbers are printed with six significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cells(std::span<const double> v);
  void end_row();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  bool first_ = true;
};

}  // namespace rijepa::experiments
