#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace plucker {

/// printf %.*g; 17 digits round-trips every double.
std::string format_number(double value, int significant_digits = 17);

/// One input line: 2n reals, a then b.
struct IoRecord {
    std::vector<double> values;
    std::size_t line_number;
};

enum class LineKind { Record, Skip, Malformed };

struct ParsedLine {
    LineKind kind;
    IoRecord record;
    std::string error;  // set for Malformed
};

/// Fields are separated by whitespace and/or commas. Blank lines and lines whose first
/// non-blank character is '#' are skipped. A record must carry exactly 2 * dim finite reals.
ParsedLine parse_record_line(std::string_view line, std::size_t line_number, std::size_t dim);

/// Splits on whitespace/commas without interpreting the fields.
std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace plucker
