#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace oscal {

// Error categories map onto CLI exit codes: 1 usage, 2 data/format, 3 fit.
class Error : public std::runtime_error {
public:
  Error(std::string kind, int exit_code, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return exit_code_; }

private:
  std::string kind_;
  int exit_code_;
};

// Bad parameters or a call that violates a precondition.
struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& msg) : Error("usage", 1, msg) {}
};

// Malformed or out-of-range file contents, unreadable/unwritable paths.
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error("data", 2, msg) {}
};

// A numerical fit could not be performed (degenerate input, too few samples).
struct FitError : Error {
  explicit FitError(const std::string& msg) : Error("fit", 3, msg) {}
};

// An object was used before it was put into a usable state.
struct StateError : Error {
  explicit StateError(const std::string& msg) : Error("state", 1, msg) {}
};

}  // namespace oscal
