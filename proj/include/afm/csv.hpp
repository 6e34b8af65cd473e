#pragma once

#include <string>
#include <vector>

namespace afm {

// Minimal locale-independent CSV: comma separated, no quoting, '.' decimal
// separator, 17-significant-digit doubles (exact round trip).

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

// Parses a cell to double; throws CsvError carrying (path, row, col) with
// 1-based positions counting the header as row 1.
double parse_cell(const std::string& cell, const std::string& path, int row, int col);

std::string format_double(double value);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace afm
