#pragma once

// Internal helpers shared by the CSV readers and writers. Not installed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dogid::text {

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source text
  std::vector<std::string> fields;
};

// Splits on newlines and commas, trims surrounding whitespace from every
// field, and drops blank lines. Quoting is not supported.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

// Shortest representation that round-trips exactly.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
void write_binary(const std::filesystem::path& path,
                  const std::vector<std::uint8_t>& bytes);

std::string where(const CsvRow& row);

}  // namespace dogid::text
