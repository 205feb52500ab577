// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_ERRORS_HPP
#define MPI_FORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mpi_forge {

/// Invalid parameters, shapes or configuration handed to an operation.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class FormatErrorKind {
  MagicMismatch,
  Truncated,
  DimOverflow,
  ZeroDim,
  InvalidValue,
  TrailingBytes,
  Json,
};

const char* to_string(FormatErrorKind kind);

/// Malformed bytes in one of the on-disk formats.
class FormatError : public std::runtime_error {
public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] FormatErrorKind kind() const noexcept { return kind_; }

private:
  FormatErrorKind kind_;
};

inline const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::MagicMismatch: return "magic mismatch";
    case FormatErrorKind::Truncated: return "truncated";
    case FormatErrorKind::DimOverflow: return "dimension overflow";
    case FormatErrorKind::ZeroDim: return "zero dimension";
    case FormatErrorKind::InvalidValue: return "invalid value";
    case FormatErrorKind::TrailingBytes: return "trailing bytes";
    case FormatErrorKind::Json: return "malformed json";
  }
  return "format error";
}

}  // namespace mpi_forge

#endif  // MPI_FORGE_ERRORS_HPP
