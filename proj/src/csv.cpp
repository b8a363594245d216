#include "lobrate/csv.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "lobrate/error.hpp"

namespace lobrate::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    double value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw Error(Errc::FormatError, "not a number: '" + field + "'");
    }
    return value;
}

std::uint64_t parse_uint(const std::string& field) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw Error(Errc::FormatError, "not an unsigned integer: '" + field + "'");
    }
    return value;
}

std::vector<std::vector<std::string>> read(std::istream& is, const std::vector<std::string>& expected_header) {
    std::string line;
    if (!std::getline(is, line)) throw Error(Errc::FormatError, "missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split(line) != expected_header) throw Error(Errc::FormatError, "unexpected CSV header '" + line + "'");

    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != expected_header.size()) {
            throw Error(Errc::FormatError, "line " + std::to_string(lineno) + " has " +
                                               std::to_string(fields.size()) + " fields");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace lobrate::csv
