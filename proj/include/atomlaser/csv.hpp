// Copyright 2026 The atomlaser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATOMLASER_CSV_HPP_
#define ATOMLASER_CSV_HPP_

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "atomlaser/common.hpp"

namespace atomlaser {

/// Shortest scientific representation that round-trips.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

using Cell = std::optional<double>;

/// One output file held in memory. Absent cells are written as empty fields.
struct Table {
  std::string name;                  // file name, e.g. "flux.csv"
  std::vector<std::string> columns;  // header row
  std::vector<std::string> units;    // one per column
  std::size_t key_columns = 1;       // leading columns identifying a row
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error(name + ": row width does not match the header");
    for (const Cell& c : row) {
      if (c && !std::isfinite(*c)) throw NumericalError(name + ": non-finite value in output");
    }
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& label) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == label) return i;
    }
    throw Error(name + ": no column '" + label + "'");
  }
};

/// `preamble` lines are emitted as '# ' comments ahead of the header row.
inline void write_csv(std::ostream& out, const Table& t, const std::vector<std::string>& preamble) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << "# units:";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << ' ' << t.columns[i] << '[' << t.units[i] << ']';
  out << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i]) out << format_number(*row[i]);
    }
    out << '\n';
  }
}

}  // namespace atomlaser

#endif  // ATOMLASER_CSV_HPP_
