#pragma once

#include <stdexcept>
#include <string>

namespace tracekit {

// Error taxonomy. The CLI maps these onto exit codes (see report.hpp).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested argument or spectral range outside what a table/function covers.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal self-check failed (missed zero, interlacing violation, ...).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input samples unusable (e.g. non-smooth profile data).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A discretisation failed its own refinement check.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tracekit
