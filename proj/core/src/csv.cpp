#include "osintphish/csv.hpp"

#include <fstream>
#include <sstream>

#include "osintphish/error.hpp"

namespace osintphish::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

Table parse(std::string_view text) {
  // A UTF-8 byte order mark is common in spreadsheet exports.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          field.push_back(c);  // stray quote inside an unquoted field
        } else {
          in_quotes = true;
          field_started = true;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        ++line;
        end_row();
        break;
      default:
        field_started = true;
        field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field near line " + std::to_string(line));
  if (field_started || !row.empty()) end_row();

  Table table;
  if (rows.empty()) return table;
  table.header = std::move(rows.front());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;  // blank line
    if (rows[r].size() != table.header.size()) {
      throw DataError("expected " + std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(rows[r].size()),
                      table.rows.size() + 1);
    }
    table.rows.push_back(std::move(rows[r]));
  }
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

std::string to_string(const Table& table) {
  std::ostringstream out;
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
  return out.str();
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << to_string(table);
}

}  // namespace osintphish::csv
