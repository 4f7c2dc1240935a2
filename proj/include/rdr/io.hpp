#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace rdr {

/// Shortest round-trip representation, capped at 12 significant digits.
/// Non-finite values print as "nan", "inf", "-inf".
std::string format_double(double x);

/// RFC-4180-style CSV with a header row. Cells are quoted only when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(std::string_view cell);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rdr
