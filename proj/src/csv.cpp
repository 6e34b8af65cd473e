#include "afm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "afm/errors.hpp"

namespace afm {

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  CsvTable table;
  std::string line;
  int row = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = s.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(s.substr(start));
        break;
      }
      fields.push_back(s.substr(start, pos - start));
      start = pos + 1;
    }
    return fields;
  };
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row == 1) {
      table.header = split(line);
    } else {
      table.rows.push_back(split(line));
      if (table.rows.back().size() != table.header.size()) {
        throw CsvError(path, row, 1,
                       "expected " + std::to_string(table.header.size()) +
                           " fields, got " + std::to_string(table.rows.back().size()));
      }
    }
  }
  if (table.header.empty()) throw DataError(path + ": empty file");
  return table;
}

double parse_cell(const std::string& cell, const std::string& path, int row, int col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw CsvError(path, row, col, "not a number: '" + cell + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << contents;
  if (!out) throw DataError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace afm
