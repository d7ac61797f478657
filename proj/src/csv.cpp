#include "wvdnet/csv.hpp"

#include "wvdnet/error.hpp"

namespace wvdnet {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvTable::CsvTable(std::string_view text) {
  auto all = parse_csv(text);
  if (all.empty()) throw DataError("csv: missing header row");
  for (std::size_t i = 0; i < all[0].size(); ++i) columns_[all[0][i]] = i;
  rows_.assign(std::make_move_iterator(all.begin() + 1), std::make_move_iterator(all.end()));
}

void CsvTable::require(const std::vector<std::string>& columns) const {
  std::string missing;
  for (const auto& c : columns) {
    if (!columns_.count(c)) missing += (missing.empty() ? "" : ", ") + c;
  }
  if (!missing.empty()) throw DataError("csv: missing column(s): " + missing);
}

const std::string& CsvTable::get(std::size_t row, const std::string& column) const {
  const auto it = columns_.find(column);
  if (it == columns_.end()) throw DataError("csv: missing column " + column);
  const auto& r = rows_.at(row);
  if (it->second >= r.size()) {
    // +2: one for the header, one for 1-based numbering
    throw DataError("csv: row " + std::to_string(row + 2) + " has no value for column " + column);
  }
  return r[it->second];
}

}  // namespace wvdnet
