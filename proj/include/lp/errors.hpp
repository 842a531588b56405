#pragma once

#include <stdexcept>
#include <string>

namespace lp {

// Failure categories surfaced by the library. The CLI maps these to exit
// code 2 (numeric/assumption failures) except unknown_identity, which is a
// usage error.
enum class errc {
  grid_too_small,
  unresolved_bandwidth,
  order_exceeded,
  order_out_of_range,
  nonpositive_regularity,
  integer_regularity,
  aliasing,
  zero_multiindex,
  insufficient_scales,
  unknown_identity,
  unbound_component,
  grid_mismatch,
  io_error,
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::grid_too_small: return "GRID_TOO_SMALL";
    case errc::unresolved_bandwidth: return "UNRESOLVED_BANDWIDTH";
    case errc::order_exceeded: return "ORDER_EXCEEDED";
    case errc::order_out_of_range: return "ORDER_OUT_OF_RANGE";
    case errc::nonpositive_regularity: return "NONPOSITIVE_REGULARITY";
    case errc::integer_regularity: return "INTEGER_REGULARITY";
    case errc::aliasing: return "ALIASING";
    case errc::zero_multiindex: return "ZERO_MULTIINDEX";
    case errc::insufficient_scales: return "INSUFFICIENT_SCALES";
    case errc::unknown_identity: return "UNKNOWN_IDENTITY";
    case errc::unbound_component: return "UNBOUND_COMPONENT";
    case errc::grid_mismatch: return "GRID_MISMATCH";
    case errc::io_error: return "IO_ERROR";
  }
  return "UNKNOWN";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

inline void require(bool ok, errc c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace lp
