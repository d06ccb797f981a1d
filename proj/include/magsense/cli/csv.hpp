#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace magsense::cli {

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Numeric table. The first line of the file is `# <comment>`, the second the header.
struct CsvTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string render() const;
};

/// Writes the table and returns the FNV-1a hash of the bytes written.
std::uint64_t write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string format_number(double value);

}  // namespace magsense::cli
