#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osintphish::csv {

using Row = std::vector<std::string>;

/// RFC 4180 table: a header row followed by data rows. Quoted fields may
/// contain separators, doubled quotes and line breaks.
struct Table {
  Row header;
  std::vector<Row> rows;

  /// Index of `name` in the header, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses a whole document. Throws DataError on an unterminated quote or a
/// row whose field count differs from the header.
Table parse(std::string_view text);
Table read_file(const std::string& path);

/// Quotes a field only when it needs quoting.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);
std::string to_string(const Table& table);
void write_file(const std::string& path, const Table& table);

}  // namespace osintphish::csv
