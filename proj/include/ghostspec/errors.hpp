#pragma once
#include <stdexcept>
#include <string>

namespace ghostspec {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric or structural parameter violates a precondition.
struct invalid_parameter_error : error {
  using error::error;
};

/// Two spectra were combined whose wavelength grids differ.
struct grid_mismatch_error : error {
  using error::error;
};

/// A spectrum with zero total counts was used where counts are required.
struct empty_measurement_error : error {
  using error::error;
};

/// A wavelength fell outside a tabulated profile's coverage.
struct coverage_error : error {
  using error::error;
};

/// A spatial region of interest is empty or outside the image bounds.
struct invalid_roi_error : error {
  using error::error;
};

/// A data file failed to parse or violated its schema.
struct parse_error : error {
  parse_error(const std::string& file, std::size_t line, const std::string& what_happened)
      : error(file + ":" + std::to_string(line) + ": " + what_happened), line_number(line) {}
  explicit parse_error(const std::string& msg) : error(msg), line_number(0) {}
  std::size_t line_number;
};

/// A file could not be opened or written.
struct io_error : error {
  using error::error;
};

}  // namespace ghostspec
