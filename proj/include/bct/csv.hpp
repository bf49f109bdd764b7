#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bct::csv {

using Row = std::vector<std::string>;

/// Reads a comma-separated file without quoting support. Blank lines are
/// skipped; fields are whitespace-trimmed. Throws InputError if unreadable.
std::vector<Row> read(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

double to_double(const std::string& field);
long long to_int(const std::string& field);

/// Shortest round-trip representation of a double.
std::string format(double x);

}  // namespace bct::csv
