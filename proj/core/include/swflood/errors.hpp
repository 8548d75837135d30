#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swflood {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (rasters, feature files, config, masks, hydrographs).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  /// Same error, attributed to a named source: "<source>:<line>: <what>".
  ParseError(const std::string& source, const ParseError& inner)
      : Error(source + ":" + std::to_string(inner.line_) + ": " + inner.detail_),
        line_(inner.line_),
        detail_(inner.detail_) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Value count does not match the declared raster dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or missing configuration. Maps to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The time integration could not continue (negative depth, NaN, dt collapse).
/// Maps to exit code 2.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time, long step, int col, int row)
      : Error(what + " (t=" + std::to_string(time) + " s, step " + std::to_string(step) +
              ", cell col=" + std::to_string(col) + " row=" + std::to_string(row) + ")"),
        time_(time),
        step_(step),
        col_(col),
        row_(row) {}

  double time() const noexcept { return time_; }
  long step() const noexcept { return step_; }
  int col() const noexcept { return col_; }
  int row() const noexcept { return row_; }

 private:
  double time_;
  long step_;
  int col_;
  int row_;
};

}  // namespace swflood
