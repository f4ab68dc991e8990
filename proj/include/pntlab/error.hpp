#pragma once

#include <stdexcept>
#include <string>

namespace pntlab {

// Numeric values double as CLI exit codes.
enum class ErrorCode : int {
  ok = 0,
  internal = 1,
  invalid_argument = 2,
  resource = 3,
  not_found = 4,
  chain_violation = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(ErrorCode::resource, what) {}
};

}  // namespace pntlab
