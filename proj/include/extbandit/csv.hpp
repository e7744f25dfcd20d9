#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace extbandit {

// Shortest round-trip decimal representation (locale-independent, '.' decimal
// separator), so equal doubles always serialize to identical bytes.
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

std::string read_text_file(const std::filesystem::path& path);  // throws ConfigError

// Writes via a temp file + rename so readers never observe partial content.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace extbandit
