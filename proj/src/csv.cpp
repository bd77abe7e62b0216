#include "classicml/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace classicml {
namespace csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line,
                  const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "line " << line << ", column " << column
        << ": cannot parse '" << cell << "' as a finite number";
    throw Error(ErrorCode::parse, msg.str());
  }
  return v;
}

}  // namespace

std::optional<std::size_t> RawTable::find_column(
    const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  return std::nullopt;
}

RawTable read_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::parse, "cannot open " + path);
  }
  RawTable table;
  table.path = path;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse, path + ": missing header row");
  }
  table.header = split_line(line);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << table.header.size()
          << " cells, found " << cells.size();
      throw Error(ErrorCode::parse, msg.str());
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) {
    throw Error(ErrorCode::empty_dataset, path + ": no data rows");
  }
  return table;
}

Matrix parse_columns(const RawTable& table,
                     const std::vector<std::size_t>& columns) {
  Matrix out(table.rows.size(), columns.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out(i, j) = parse_cell(table.rows[i][columns[j]], i + 2,
                             table.header[columns[j]]);
    }
  }
  return out;
}

std::vector<std::string> column_strings(const RawTable& table,
                                        std::size_t column) {
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[column]);
  return out;
}

Table load_csv(const std::string& path,
               const std::optional<std::string>& label_column) {
  const RawTable raw = read_raw(path);

  std::optional<std::size_t> label_index;
  if (label_column) {
    label_index = raw.find_column(*label_column);
    if (!label_index) {
      throw Error(ErrorCode::config,
                  "label column '" + *label_column + "' not found in " + path);
    }
  }

  Table table;
  table.label_name = label_column;
  std::vector<std::size_t> feature_columns;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    if (label_index && *label_index == j) continue;
    table.feature_names.push_back(raw.header[j]);
    feature_columns.push_back(j);
  }
  table.features = parse_columns(raw, feature_columns);
  if (label_index) table.label_values = column_strings(raw, *label_index);
  return table;
}

Labels table_labels(const Table& table) {
  if (table.label_values.empty()) {
    throw Error(ErrorCode::config, "no label column was loaded");
  }
  return encode_labels(table.label_values);
}

Targets table_targets(const Table& table) {
  if (table.label_values.empty()) {
    throw Error(ErrorCode::config, "no label column was loaded");
  }
  Targets t;
  t.values.reserve(table.label_values.size());
  for (std::size_t i = 0; i < table.label_values.size(); ++i) {
    t.values.push_back(parse_cell(table.label_values[i], i + 2,
                                  table.label_name.value_or("label")));
  }
  return t;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::parse, "cannot write " + path);
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

}  // namespace csv
}  // namespace classicml
