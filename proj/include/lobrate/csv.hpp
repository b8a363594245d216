#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Minimal CSV helpers for the staging files. Fields never contain commas or
// quotes, so no quoting is supported.
namespace lobrate::csv {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

double parse_double(const std::string& field);
std::uint64_t parse_uint(const std::string& field);

/// Reads all data rows; throws FormatError when the header differs from
/// `expected_header` or a row has the wrong number of fields.
std::vector<std::vector<std::string>> read(std::istream& is, const std::vector<std::string>& expected_header);

}  // namespace lobrate::csv
