#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frechetcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Objects of different spaces or shapes were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a type invariant (non-monotone quantiles, asymmetric
/// matrices, non-finite entries, malformed files).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An argument or configuration value is outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The pooled variance-of-variance estimate is too small to standardize the
/// scan function.
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal diagnostics and returns the previous one.
/// The default handler writes to std::clog.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace frechetcp
