#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Flat CSV tables.  Numbers are written with 17 significant digits through
// std::to_chars, so output is locale independent and parses back exactly.

namespace ermakov::app {

std::string format_number(double value);
double parse_number(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // throws std::out_of_range
  bool has_column(std::string_view name) const;
};

void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
std::string to_csv_string(const Table& table);

Table read_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);

}  // namespace ermakov::app
