#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace etas::text {

/// Shortest decimal text that parses back to the identical double.
[[nodiscard]] std::string format_double(double value);

/// Strict full-string parse; throws std::invalid_argument on trailing garbage.
[[nodiscard]] double parse_double(std::string_view text);

[[nodiscard]] std::vector<std::string> split(std::string_view text, char sep);
[[nodiscard]] std::string_view trim(std::string_view text);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so the
/// destination is either the complete new content or untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace etas::text
