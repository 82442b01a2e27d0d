#pragma once

#include <stdexcept>
#include <string>

namespace flode {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  dimension_mismatch,
  numeric_failure,
  io_error,
  unsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace flode
