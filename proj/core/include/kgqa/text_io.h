#pragma once

// Small helpers shared by the line-oriented file formats.

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa::io {

// Splits on every occurrence of `sep`; empty fields are preserved.
std::vector<std::string_view> split(std::string_view s, char sep);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Strict parsers; throw kgqa::Error on trailing garbage or overflow.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so readers never see a
// half-written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace kgqa::io
