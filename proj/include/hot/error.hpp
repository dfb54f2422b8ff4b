#pragma once

#include <stdexcept>
#include <string>

namespace hot {

// Every failure raised by the library carries one of these codes so callers
// (and the CLI's exit-code mapping) can tell failure classes apart without
// parsing messages.
enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  non_finite,
  out_of_range,
  io,
  bad_magic,
  bad_version,
  unsupported_dtype,
  truncated_payload,
  parse,
  unknown_key,
  band_unresolvable,
  no_pulse,
  degenerate,
  corrupted_spectrum,
  oracle_scope,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hot
