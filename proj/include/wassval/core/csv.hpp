#pragma once

#include <string>
#include <string_view>
#include <vector>

// Low-level CSV plumbing. Floats are serialized in decimal-shortest
// round-trip form (std::to_chars) so that write→read is exact.
namespace wassval::csv {

std::string format_double(double value);
double parse_double(std::string_view text);

std::vector<std::string_view> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a CSV file with a mandatory header row; every body cell must parse
// as a double. Empty lines are skipped.
Table read_table(const std::string& path);

// Writes header + numeric rows.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

}  // namespace wassval::csv
