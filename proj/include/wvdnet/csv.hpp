#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wvdnet {

// RFC 4180-style reader: comma separated, double-quoted fields may contain
// commas, quotes ("") and newlines. CR before LF is dropped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

// Header-indexed view over parsed rows.
class CsvTable {
 public:
  explicit CsvTable(std::string_view text);

  // Throws DataError naming every missing column.
  void require(const std::vector<std::string>& columns) const;

  std::size_t rows() const { return rows_.size(); }
  const std::string& get(std::size_t row, const std::string& column) const;

 private:
  std::map<std::string, std::size_t> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace wvdnet
