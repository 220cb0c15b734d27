#pragma once

#include <stdexcept>
#include <string>

namespace commonsense {

enum class Errc {
  invalid_argument,
  spec_mismatch,
  budget_exceeded,
  corrupt_stream,
  protocol_error,
  signature_collision,
  infeasible,
  decode_failure,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Exception type thrown by every fallible operation in the library.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace commonsense
