#pragma once

#include <stdexcept>
#include <string>

namespace afm {

// Thrown for malformed or inconsistent input files (bad CSV cells,
// shape mismatches between artifacts on disk, unreadable paths).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// CSV parse failure with the offending location.
class CsvError : public DataError {
 public:
  CsvError(const std::string& path, int row, int col, const std::string& what)
      : DataError(path + ":" + std::to_string(row) + ":" + std::to_string(col) +
                  ": " + what),
        path_(path),
        row_(row),
        col_(col) {}

  const std::string& path() const { return path_; }
  int row() const { return row_; }
  int col() const { return col_; }

 private:
  std::string path_;
  int row_;
  int col_;
};

// Thrown when a numeric routine cannot proceed: singular normal equations,
// diverging loss, degenerate series, non-finite transforms.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad run configuration (CLI / JSON level).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace afm
