// csv.cpp

#include "spinflop/csv.hpp"

#include <cstdio>
#include <ostream>

namespace spinflop {

std::string format_number(double v, const CsvFormat& fmt) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.*g", fmt.precision, v);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv_header(std::ostream& os, std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

void write_csv_row(std::ostream& os, std::initializer_list<double> values, const CsvFormat& fmt) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_number(v, fmt);
        first = false;
    }
    os << '\n';
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace spinflop
