#include "burden/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "burden/errors.hpp"

namespace burden {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string format_double_17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  if (text == "inf" || text == "+inf" || text == "Infinity")
    return std::numeric_limits<double>::infinity();
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    throw ParseError("not a number: '" + std::string(text) + "'");
  return value;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string config_hash_hex(const nlohmann::json& config) {
  const std::uint64_t h = fnv1a64(config.dump());
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& comment)
    : out_(path, std::ios::binary) {
  if (!out_) throw ParseError("cannot open '" + path + "' for writing");
  out_ << "# " << comment << "\n";
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

std::size_t CsvContent::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("missing CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvContent read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  CsvContent content;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      content.comments.push_back(line);
      continue;
    }
    if (!have_header) {
      content.header = split_line(line);
      have_header = true;
    } else {
      content.rows.push_back(split_line(line));
    }
  }
  if (!have_header) throw ParseError("'" + path + "' has no header row");
  return content;
}

void write_classifier_json(const Classifier& f, const std::string& path,
                           const nlohmann::json* metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "{\n";
  if (std::holds_alternative<ThresholdClassifier>(f)) {
    const auto& t = std::get<ThresholdClassifier>(f);
    out << "  \"kind\": \"threshold\",\n";
    out << "  \"tau0\": " << format_double_17(t.tau0) << ",\n";
    out << "  \"tau1\": " << format_double_17(t.tau1);
  } else {
    const auto& lin = std::get<LinearClassifier>(f);
    out << "  \"kind\": \"linear\",\n";
    out << "  \"u\": [";
    for (Eigen::Index i = 0; i < lin.weights.size(); ++i) {
      if (i) out << ", ";
      out << format_double_17(lin.weights[i]);
    }
    out << "],\n";
    out << "  \"v0\": " << format_double_17(lin.v0) << ",\n";
    out << "  \"v1\": " << format_double_17(lin.v1);
  }
  if (metadata) out << ",\n  \"metadata\": " << metadata->dump();
  out << "\n}\n";
}

Classifier read_classifier_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("kind"))
    throw ValidationError("classifier JSON needs a 'kind' field");
  const std::string kind = doc["kind"].get<std::string>();
  try {
    if (kind == "threshold") {
      ThresholdClassifier t;
      t.tau0 = doc.at("tau0").get<double>();
      t.tau1 = doc.at("tau1").get<double>();
      return t;
    }
    if (kind == "linear") {
      LinearClassifier lin;
      const auto& u = doc.at("u");
      lin.weights.resize(static_cast<Eigen::Index>(u.size()));
      for (std::size_t i = 0; i < u.size(); ++i)
        lin.weights[static_cast<Eigen::Index>(i)] = u[i].get<double>();
      lin.v0 = doc.at("v0").get<double>();
      lin.v1 = doc.at("v1").get<double>();
      return lin;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("classifier JSON in '" + path + "' is incomplete: " + e.what());
  }
  throw ValidationError("unknown classifier kind '" + kind + "'");
}

nlohmann::json read_classifier_metadata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("metadata")) return doc["metadata"];
  return nlohmann::json();
}

std::string metrics_csv_header_line() {
  return "psi,accuracy,h0,h1,h_gap,g0,g1,g_gap,p0,p1,e0,e1,n0,n1";
}

}  // namespace burden
