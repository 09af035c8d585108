#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quantfix::cli {

/// Rectangular text table with a header row. Numbers go in through
/// format_number so that every double survives a CSV round trip.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  friend bool operator==(const Table&, const Table&) = default;
};

/// Shortest form with 17 significant digits ("%.17g").
std::string format_number(double value);
std::string format_number(long value);

std::string emit_csv(const Table& table);

/// Parses RFC 4180-style CSV (quoted fields, doubled quotes). The first
/// record is the header. Throws std::invalid_argument on ragged rows.
Table parse_csv(std::string_view text);

}  // namespace quantfix::cli
