#pragma once

// In-memory tabular data with a typed column schema plus CSV and sidecar
// schema file I/O. Categorical cells are stored as integer codes into the
// column codebook; CSV emission writes the labels back.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tabdrw {

enum class ColumnType { continuous, discrete, categorical };

struct ColumnKind {
  ColumnType type = ColumnType::continuous;
  int decimals = 0;                      // discrete only: grid 10^(-decimals) * Z
  std::vector<std::string> codebook;     // categorical only; labels unique

  static ColumnKind make_continuous() { return {ColumnType::continuous, 0, {}}; }
  static ColumnKind make_discrete(int d) { return {ColumnType::discrete, d, {}}; }
  static ColumnKind make_categorical(std::vector<std::string> labels) {
    return {ColumnType::categorical, 0, std::move(labels)};
  }
};

struct ColumnSchema {
  std::string name;
  ColumnKind kind;
  std::optional<double> lower;
  std::optional<double> upper;

  bool numeric() const { return kind.type != ColumnType::categorical; }
};

struct Table {
  std::vector<ColumnSchema> schema;
  std::vector<std::vector<double>> values;  // row-major, values[i][j]

  std::size_t rows() const { return values.size(); }
  std::size_t cols() const { return schema.size(); }

  // Indices of the numeric (continuous + discrete) columns, in schema order.
  std::vector<int> numeric_columns() const {
    std::vector<int> out;
    for (std::size_t j = 0; j < schema.size(); ++j)
      if (schema[j].numeric()) out.push_back(int(j));
    return out;
  }

  int column_index(const std::string& name) const {
    for (std::size_t j = 0; j < schema.size(); ++j)
      if (schema[j].name == name) return int(j);
    throw std::runtime_error("no such column: " + name);
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  return std::isfinite(out);
}

// Number of digits after the decimal point in the textual form, or -1 when
// the cell uses scientific notation (treated as "many").
inline int textual_decimals(const std::string& s) {
  if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) return -1;
  auto dot = s.find('.');
  if (dot == std::string::npos) return 0;
  return int(s.size() - dot - 1);
}

inline std::string format_cell(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Deterministic kind inference from raw text cells:
//   * any cell that fails numeric parsing       -> categorical (codebook in
//     order of first appearance);
//   * all integers                              -> discrete(0);
//   * all cells sharing one decimal count d<=6  -> discrete(d);
//   * otherwise                                 -> continuous.
// Numeric bounds default to the observed min/max.
inline std::vector<ColumnSchema> infer_schema(const std::vector<std::string>& header,
                                              const std::vector<std::vector<std::string>>& rows) {
  if (header.empty()) throw std::runtime_error("infer_schema: zero columns");
  if (rows.empty()) throw std::runtime_error("infer_schema: need at least one data row");
  std::vector<ColumnSchema> schema(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    ColumnSchema& cs = schema[j];
    cs.name = header[j];
    bool all_numeric = true;
    int dmin = 1 << 20, dmax = -1;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : rows) {
      double v;
      if (!detail::parse_double(row[j], v)) {
        all_numeric = false;
        break;
      }
      int d = detail::textual_decimals(row[j]);
      if (d < 0) d = 1 << 20;
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (all_numeric) {
      if (dmax == 0)
        cs.kind = ColumnKind::make_discrete(0);
      else if (dmax <= 6 && dmin == dmax)
        cs.kind = ColumnKind::make_discrete(dmax);
      else
        cs.kind = ColumnKind::make_continuous();
      cs.lower = lo;
      cs.upper = hi;
    } else {
      std::vector<std::string> codebook;
      for (const auto& row : rows)
        if (std::find(codebook.begin(), codebook.end(), row[j]) == codebook.end())
          codebook.push_back(row[j]);
      cs.kind = ColumnKind::make_categorical(std::move(codebook));
    }
  }
  return schema;
}

inline Table read_csv(const std::string& path,
                      std::optional<std::vector<ColumnSchema>> schema = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> header = detail::split_csv_line(line);

  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(raw.size() + 1) +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    raw.push_back(std::move(cells));
  }

  Table t;
  bool inferred = !schema.has_value();
  if (schema) {
    if (schema->size() != header.size())
      throw std::runtime_error(path + ": schema has " + std::to_string(schema->size()) +
                               " columns, file has " + std::to_string(header.size()));
    for (std::size_t j = 0; j < header.size(); ++j)
      if ((*schema)[j].name != header[j])
        throw std::runtime_error(path + ": header '" + header[j] +
                                 "' does not match schema column '" + (*schema)[j].name + "'");
    t.schema = std::move(*schema);
  } else {
    if (raw.empty()) {
      // Header-only file without a schema: degenerate continuous columns.
      for (const auto& h : header) t.schema.push_back({h, ColumnKind::make_continuous(), {}, {}});
      return t;
    }
    t.schema = infer_schema(header, raw);
  }

  t.values.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::vector<double> row(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
      ColumnSchema& cs = t.schema[j];
      if (cs.kind.type == ColumnType::categorical) {
        auto& cb = cs.kind.codebook;
        auto it = std::find(cb.begin(), cb.end(), raw[i][j]);
        if (it == cb.end()) {
          if (!inferred)
            throw std::runtime_error(path + ": row " + std::to_string(i + 1) + ", column '" +
                                     cs.name + "': label '" + raw[i][j] + "' not in codebook");
          cb.push_back(raw[i][j]);
          it = cb.end() - 1;
        }
        row[j] = double(it - cb.begin());
      } else {
        double v;
        if (!detail::parse_double(raw[i][j], v))
          throw std::runtime_error(path + ": row " + std::to_string(i + 1) + ", column '" +
                                   cs.name + "': cannot parse '" + raw[i][j] + "' as a number");
        row[j] = v;
      }
    }
    t.values.push_back(std::move(row));
  }
  return t;
}

inline void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t j = 0; j < t.schema.size(); ++j)
    out << (j ? "," : "") << t.schema[j].name;
  out << "\n";
  for (const auto& row : t.values) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      const ColumnSchema& cs = t.schema[j];
      if (cs.kind.type == ColumnType::categorical) {
        int code = int(row[j]);
        if (code < 0 || code >= int(cs.kind.codebook.size()))
          throw std::runtime_error("categorical code out of range in column " + cs.name);
        out << cs.kind.codebook[code];
      } else {
        out << detail::format_cell(row[j]);
      }
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("I/O failure writing " + path);
}

// Sidecar schema file: one line per column,
//   name,kind,decimals,lower,upper[,label;label;...]
// with empty fields for absent bounds.
inline void write_schema_file(const std::vector<ColumnSchema>& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& cs : schema) {
    const char* kind = cs.kind.type == ColumnType::continuous  ? "continuous"
                       : cs.kind.type == ColumnType::discrete ? "discrete"
                                                              : "categorical";
    out << cs.name << "," << kind << "," << cs.kind.decimals << ",";
    if (cs.lower) out << detail::format_cell(*cs.lower);
    out << ",";
    if (cs.upper) out << detail::format_cell(*cs.upper);
    if (cs.kind.type == ColumnType::categorical) {
      out << ",";
      for (std::size_t k = 0; k < cs.kind.codebook.size(); ++k)
        out << (k ? ";" : "") << cs.kind.codebook[k];
    }
    out << "\n";
  }
}

inline std::vector<ColumnSchema> read_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ColumnSchema> schema;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() < 5) throw std::runtime_error(path + ": malformed schema line: " + line);
    ColumnSchema cs;
    cs.name = f[0];
    if (f[1] == "continuous") {
      cs.kind = ColumnKind::make_continuous();
    } else if (f[1] == "discrete") {
      cs.kind = ColumnKind::make_discrete(std::stoi(f[2]));
    } else if (f[1] == "categorical") {
      std::vector<std::string> cb;
      if (f.size() >= 6 && !f[5].empty()) {
        std::stringstream ss(f[5]);
        std::string label;
        while (std::getline(ss, label, ';')) cb.push_back(label);
      }
      cs.kind = ColumnKind::make_categorical(std::move(cb));
    } else {
      throw std::runtime_error(path + ": unknown kind '" + f[1] + "'");
    }
    double v;
    if (detail::parse_double(f[3], v)) cs.lower = v;
    if (detail::parse_double(f[4], v)) cs.upper = v;
    schema.push_back(std::move(cs));
  }
  return schema;
}

}  // namespace tabdrw
