#include "hot/error.hpp"

namespace hot {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::out_of_range: return "value out of range";
    case ErrorCode::io: return "I/O failure";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::bad_version: return "bad version";
    case ErrorCode::unsupported_dtype: return "unsupported dtype";
    case ErrorCode::truncated_payload: return "truncated payload";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::unknown_key: return "unknown key";
    case ErrorCode::band_unresolvable: return "band unresolvable";
    case ErrorCode::no_pulse: return "no pulse detected";
    case ErrorCode::degenerate: return "degenerate input";
    case ErrorCode::corrupted_spectrum: return "corrupted spectrum";
    case ErrorCode::oracle_scope: return "oracle scope exceeded";
  }
  return "unknown error";
}

}  // namespace hot
