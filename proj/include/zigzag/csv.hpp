#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace zigzag::csv {

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string num(double x);

/// Parses what num() writes. Throws std::invalid_argument on garbage.
double parse_num(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep = ',');

void write_metadata(std::ostream& out, const std::vector<std::string>& lines);

/// Plain comma-separated table with '#' metadata lines. No quoting: fields
/// never contain commas.
struct Table {
  std::vector<std::string> metadata;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

Table read(std::istream& in);
void write(std::ostream& out, const Table& table);

}  // namespace zigzag::csv
