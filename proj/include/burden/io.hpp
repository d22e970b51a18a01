#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "burden/types.hpp"

namespace burden {

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double value);

// 17-significant-digit form used in classifier JSON files.
std::string format_double_17(double value);

double parse_double(std::string_view text);  // strict; throws ParseError

std::uint64_t fnv1a64(std::string_view text);

// Hash of the canonical (sorted-key) dump of a config; stamped into every
// output file so runs are attributable to their exact configuration.
std::string config_hash_hex(const nlohmann::json& config);

inline std::string tool_version() { return "0.1.0"; }

// CSV writer that prepends the provenance comment line
//   # tool=burden version=<v> config_hash=<hex>
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& comment);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  void close() { out_.close(); }  // flush before anyone re-reads the file

 private:
  std::ofstream out_;
};

struct CsvContent {
  std::vector<std::string> comments;  // lines starting with '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ParseError
};

CsvContent read_csv(const std::string& path);

// Classifier JSON: {"kind":"threshold","tau0":..,"tau1":..} or
// {"kind":"linear","u":[..],"v0":..,"v1":..}, reals printed with 17
// significant digits, optional free-form "metadata" object.
void write_classifier_json(const Classifier& f, const std::string& path,
                           const nlohmann::json* metadata = nullptr);
Classifier read_classifier_json(const std::string& path);

// The "metadata" object of a classifier file, or null when absent. Trained
// classifiers store the normalization of their training partition here so
// audits can evaluate them in the space they were fit in.
nlohmann::json read_classifier_metadata(const std::string& path);

std::string metrics_csv_header_line();

}  // namespace burden
