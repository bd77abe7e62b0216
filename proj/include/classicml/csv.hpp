#pragma once

#include <optional>
#include <string>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace csv {

// Comma-separated, header row required, decimal-point numerics, no quoting,
// UTF-8. Cells are kept as strings until a consumer asks for numeric
// columns, so non-numeric columns (e.g. class labels) never break parsing.
struct RawTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find_column(const std::string& name) const;
};

RawTable read_raw(const std::string& path);

// Parses the given columns as finite doubles; errors carry line and column.
Matrix parse_columns(const RawTable& table,
                     const std::vector<std::size_t>& columns);

std::vector<std::string> column_strings(const RawTable& table,
                                        std::size_t column);

// Fully parsed training view: every non-label column must be numeric.
struct Table {
  std::vector<std::string> feature_names;
  Matrix features;
  std::optional<std::string> label_name;
  std::vector<std::string> label_values;  // raw strings, row order
};

Table load_csv(const std::string& path,
               const std::optional<std::string>& label_column);

Labels table_labels(const Table& table);
Targets table_targets(const Table& table);  // label column parsed as numbers

// 12 significant digits, matching the CLI output contract.
std::string format_value(double v);

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace csv
}  // namespace classicml
