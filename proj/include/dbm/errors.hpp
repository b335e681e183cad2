#pragma once

#include <stdexcept>
#include <string>

namespace dbm {

// Shape or domain violation in model inputs.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad configuration values (learning rate <= 0, zero chains, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exact enumeration refused: model too large for the oracle budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/Inf detected in a gradient or parameter update.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (IDX or checkpoint). Subtypes keep the failure
// modes distinguishable in tests and exit codes.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagicError : FormatError {
  using FormatError::FormatError;
};
struct TruncationError : FormatError {
  using FormatError::FormatError;
};
struct ChecksumError : FormatError {
  using FormatError::FormatError;
};
struct VersionError : FormatError {
  using FormatError::FormatError;
};

}  // namespace dbm
