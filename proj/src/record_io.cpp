#include "plucker/record_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace plucker {

namespace {

bool is_separator(char c) noexcept {
    return c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

}  // namespace

std::string format_number(double value, int significant_digits) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_separator(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_separator(line[i])) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

ParsedLine parse_record_line(std::string_view line, std::size_t line_number, std::size_t dim) {
    ParsedLine out{LineKind::Skip, IoRecord{{}, line_number}, {}};
    const std::size_t first = line.find_first_not_of(" \t\r\n\v\f");
    if (first == std::string_view::npos || line[first] == '#') return out;

    const auto fields = split_fields(line);
    const auto fail = [&](std::string message) {
        out.kind = LineKind::Malformed;
        out.error = "line " + std::to_string(line_number) + ": " + std::move(message);
        out.record.values.clear();
        return out;
    };
    if (fields.size() != 2 * dim) {
        return fail("expected " + std::to_string(2 * dim) + " fields, got " +
                    std::to_string(fields.size()));
    }
    out.record.values.reserve(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        std::string_view field = fields[f];
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            return fail("field " + std::to_string(f + 1) + " is not a number: '" +
                        std::string(fields[f]) + "'");
        }
        if (!std::isfinite(v)) {
            return fail("field " + std::to_string(f + 1) + " is not finite");
        }
        out.record.values.push_back(v);
    }
    out.kind = LineKind::Record;
    return out;
}

}  // namespace plucker
