#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ehlab::io {

/// Shortest-safe formatting with 17 significant digits, so values round-trip
/// and reruns produce identical bytes.
std::string format_double(double x);

/// Splits one CSV line on commas. No quoting support; the formats here never
/// need it.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a double, throwing ConfigError with `context` on failure.
double parse_double(std::string_view text, std::string_view context);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ehlab::io
