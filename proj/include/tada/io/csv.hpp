#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tada {

// File-system failures: unreadable input, unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};

/// Comma-separated text with a header row. Fields may be double-quoted
/// ("" escapes a quote); CRLF line endings and a UTF-8 BOM are accepted.
/// Blank lines are skipped. Ragged rows throw ValidationError.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

// 6 significant digits; NA / Inf / -Inf for non-finite values.
std::string format_real(double value);

}  // namespace tada
