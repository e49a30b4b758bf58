#pragma once

#include <stdexcept>
#include <string>

namespace cpml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message names file, row and (when known) column.
class ParseError : public Error {
public:
  ParseError(const std::string& file, std::size_t row, const std::string& column,
             const std::string& what)
      : Error(file + ": row " + std::to_string(row) +
              (column.empty() ? std::string() : ", column '" + column + "'") + ": " + what),
        row_(row) {}

  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

/// Error raised inside a pipeline stage, tagged with the stage name.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

} // namespace cpml
