// csv.hpp — Deterministic numeric formatting for CSV output

#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spinflop {

struct CsvFormat {
    int precision{17}; // significant digits, printf %.*g
};

std::string format_number(double v, const CsvFormat& fmt);

/// Writes `header` joined by ',' and terminated by '\n'.
void write_csv_header(std::ostream& os, std::initializer_list<std::string_view> columns);

/// Writes one row of numbers joined by ',' and terminated by '\n'.
void write_csv_row(std::ostream& os, std::initializer_list<double> values, const CsvFormat& fmt);

/// Splits a line on ','; no quoting.
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace spinflop
