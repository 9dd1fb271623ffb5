#ifndef MCEST_HARNESS_CSV_HPP
#define MCEST_HARNESS_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcest/errors.hpp"

namespace mcest::harness {

enum class CellType { integer, real, text };

struct Column {
  std::string name;
  CellType type = CellType::real;
  bool nullable = false;  ///< empty cell allowed (values that could not be computed)
};

using Schema = std::vector<Column>;

/// Fixed formatting so identical values always give identical bytes.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string format_int(std::int64_t x) { return std::to_string(x); }

namespace detail {

inline bool parses_as_integer(std::string_view s) {
  std::int64_t v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline bool parses_as_real(std::string_view s) {
  if (s == "inf" || s == "-inf") return true;
  std::string tmp(s);
  char* end = nullptr;
  std::strtod(tmp.c_str(), &end);
  return !tmp.empty() && end == tmp.c_str() + tmp.size();
}

inline bool needs_quotes(std::string_view s) { return s.find_first_of(",\"\r\n") != std::string_view::npos; }

inline std::string quote(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Rows of preformatted cells under a fixed schema.
class CsvTable {
 public:
  explicit CsvTable(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  /// Every row has one cell per column and each cell matches its column type.
  void validate() const {
    std::ostringstream bad;
    int n_bad = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto& row = rows_[r];
      if (row.size() != schema_.size()) {
        bad << " row " << r + 1 << ": " << row.size() << " cells for " << schema_.size() << " columns;";
        ++n_bad;
        continue;
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        const Column& col = schema_[c];
        const std::string& cell = row[c];
        bool ok = true;
        if (cell.empty()) ok = col.nullable || col.type == CellType::text;
        else if (col.type == CellType::integer) ok = detail::parses_as_integer(cell);
        else if (col.type == CellType::real) ok = detail::parses_as_real(cell);
        if (!ok) {
          bad << " row " << r + 1 << " column '" << col.name << "': '" << cell << "';";
          ++n_bad;
        }
      }
    }
    if (n_bad > 0) throw validation_error("CSV schema violation:" + bad.str());
  }

  /// RFC 4180 style text with a header row and '\n' line ends.
  std::string render() const {
    validate();
    std::string out;
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      if (c) out += ',';
      out += detail::quote(schema_[c].name);
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += detail::quote(row[c]);
      }
      out += '\n';
    }
    return out;
  }

 private:
  Schema schema_;
  std::vector<std::vector<std::string>> rows_;
};

/// Splits CSV text into records. Handles quoted fields and CRLF.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') { field += '"'; ++i; }
        else quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') { quoted = true; any = true; }
    else if (c == ',') { rec.push_back(std::move(field)); field.clear(); any = true; }
    else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw validation_error("CSV: unterminated quoted field");
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw validation_error("write failed for '" + path + "'");
}

}  // namespace mcest::harness

#endif  // MCEST_HARNESS_CSV_HPP
