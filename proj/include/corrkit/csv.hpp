#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrkit::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 if absent
};

Table parse(const std::string& text);
Table read_file(const std::string& path);

// RFC-4180: quote fields containing comma, quote, or newline; double quotes.
std::string escape_field(const std::string& field);
void write(std::ostream& out, const Table& table);
void write_file(const std::string& path, const Table& table);

}  // namespace corrkit::csv
