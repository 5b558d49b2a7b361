#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sot {

// SHA-256 of arbitrary bytes, lowercase hex.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's contents. Throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
std::string ascii_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Position of the last case-insensitive (ASCII fold) occurrence of `needle`.
std::optional<size_t> rfind_ci(std::string_view haystack, std::string_view needle);

// Decodes the UTF-8 code point starting at byte `pos`. Advances `pos` past it.
// Invalid sequences decode as U+FFFD and advance one byte, so scanning
// arbitrary bytes never gets stuck.
char32_t utf8_next(std::string_view s, size_t& pos);

size_t count_whitespace_tokens(std::string_view s);

// Collapses all whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view s);

}  // namespace sot
