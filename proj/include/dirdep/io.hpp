#pragma once

// Delimited data files for the command-line front end.
//
// Layout: one header row, then one observation per row. Comma, tab or
// semicolon separated (detected from the header). Blank lines and lines
// starting with '#' are skipped. A circular variable is one angle column, a
// spherical variable d+1 coordinate columns, a linear variable one column.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dirdep/csv.hpp"
#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"

namespace dirdep {

enum class ColumnType { circular_deg, circular_rad, sphere, linear };

inline ColumnType parse_column_type(std::string_view s) {
  if (s == "circular-deg") return ColumnType::circular_deg;
  if (s == "circular-rad") return ColumnType::circular_rad;
  if (s == "sphere") return ColumnType::sphere;
  if (s == "linear") return ColumnType::linear;
  throw ConfigError("unknown variable type '" + std::string(s) +
                    "' (expected circular-deg, circular-rad, sphere or linear)");
}

struct DataTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    // 1-based numeric index
    double v = 0;
    if (csv::parse_double(name, v) && v >= 1 && v <= static_cast<double>(header.size()) &&
        v == static_cast<double>(static_cast<std::size_t>(v))) {
      return static_cast<std::size_t>(v) - 1;
    }
    throw ConfigError("no column named '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line, char delim) {
  if (delim == ',') return csv::split(line);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(csv::trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& f : out) {
    if (!f.empty() && f.back() == '\r') f.pop_back();
  }
  return out;
}

}  // namespace detail

/// Parses a data table; `source` names the file in error messages. Line
/// numbers in messages are 1-based file lines.
inline DataTable parse_data_table(std::string_view text, std::string_view source = "<data>") {
  DataTable t;
  char delim = ',';
  std::size_t pos = 0, line_no = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (csv::trim(line).empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (!have_header) {
      if (line.find(',') == std::string_view::npos) {
        if (line.find('\t') != std::string_view::npos) delim = '\t';
        else if (line.find(';') != std::string_view::npos) delim = ';';
      }
      for (auto& h : detail::split_fields(line, delim)) t.header.push_back(csv::trim(h));
      have_header = true;
    } else {
      const auto fields = detail::split_fields(line, delim);
      if (fields.size() != t.header.size()) {
        std::ostringstream os;
        os << source << ": line " << line_no << " has " << fields.size() << " fields, header has "
           << t.header.size();
        throw InputError(os.str());
      }
      std::vector<double> row(fields.size());
      for (std::size_t j = 0; j < fields.size(); ++j) {
        if (!csv::parse_double(fields[j], row[j])) {
          std::ostringstream os;
          os << source << ": line " << line_no << ", column '" << t.header[j]
             << "': cannot parse '" << fields[j] << "' as a number";
          throw InputError(os.str());
        }
      }
      t.rows.push_back(std::move(row));
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw InputError(std::string(source) + ": empty data file");
  if (t.rows.size() < 2) {
    throw InputError(std::string(source) + ": need at least 2 data rows, found " +
                     std::to_string(t.rows.size()));
  }
  return t;
}

inline DataTable read_data_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_data_table(ss.str(), path);
}

/// Builds one variable from the chosen columns of a table.
inline DirectionalSample column_sample(const DataTable& t, const std::vector<std::size_t>& cols,
                                       ColumnType type, bool renormalize = false) {
  const bool one_column = type != ColumnType::sphere;
  if (cols.empty()) throw ConfigError("no columns selected");
  if (one_column && cols.size() != 1) {
    throw ConfigError("circular and linear variables take exactly one column, got " +
                      std::to_string(cols.size()));
  }
  if (type == ColumnType::sphere && cols.size() < 2) {
    throw ConfigError("spherical variables need at least 2 coordinate columns");
  }
  std::vector<double> first(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) first[i] = t.rows[i][cols[0]];
  switch (type) {
    case ColumnType::circular_deg:
      return angles_to_sample(AngleVector::from_degrees(first));
    case ColumnType::circular_rad:
      return angles_to_sample(AngleVector(std::move(first)));
    case ColumnType::linear:
      return linear_sample(first);
    case ColumnType::sphere: {
      DenseMatrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][cols[j]];
        }
      }
      try {
        return DirectionalSample(std::move(m), SampleKind::sphere(static_cast<int>(cols.size()) - 1),
                                 renormalize);
      } catch (const InputError& e) {
        // Report the file line rather than the 0-based matrix row.
        throw InputError(std::string(e.what()) + " (data row 0 is the first line after the header)");
      }
    }
  }
  throw ConfigError("unreachable column type");
}

}  // namespace dirdep
