#pragma once

#include <stdexcept>
#include <string>

namespace snumlab {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  precondition = 2,
  unsupported_boundary = 3,
  unsupported_endpoint = 4,
  out_of_range = 5,
  capacity = 6,
  config = 7,
  io = 8,
  degenerate = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace snumlab
