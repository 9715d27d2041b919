#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace subjpipe::text {

// Replaces every invalid UTF-8 byte sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

std::vector<std::string_view> split_tabs(std::string_view line);

std::string_view trim(std::string_view s);

bool is_space(char c);

// Splits file content into lines on LF, dropping one trailing CR per line and
// the empty remainder after a final newline.
std::vector<std::string_view> split_lines(std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Backslash escaping for single-line TSV cells: \\ \t \n \r.
std::string escape_cell(std::string_view raw);
std::string unescape_cell(std::string_view escaped);

std::string format_fixed(double value, int decimals);

}  // namespace subjpipe::text
