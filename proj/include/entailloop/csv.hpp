#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace entailloop {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// RFC-4180 field quoting: fields containing ',', '"', CR or LF are wrapped
/// in double quotes with embedded quotes doubled.
std::string csv_field(std::string_view field);

/// Line-oriented CSV writer (LF endings, UTF-8).
///
/// Every file starts with a schema comment line "# entailloop:<schema> v<N>"
/// followed by the column header. Column order is part of the schema; a
/// reordering requires a version bump.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view schema,
            const std::vector<std::string>& header, int version = 1);

  void row(const std::vector<std::string>& fields);

  std::size_t columns() const { return columns_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Splits one CSV record (no embedded newlines) honoring RFC-4180 quoting.
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace entailloop
