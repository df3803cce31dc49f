#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gwquant {

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);

/// Strict full-string parse; `where` prefixes the parse error message.
double parse_real(std::string_view text, const std::string& where);
long long parse_integer(std::string_view text, const std::string& where);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace gwquant
