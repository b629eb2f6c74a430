#pragma once

#include <stdexcept>
#include <string>

namespace rgc {

enum class errc {
  invalid_argument,
  dimension_mismatch,
  sizing,
  margin,
  geometry,
  intensity_unavailable,
  insufficient_conditioning,
  degenerate,
  cap_exceeded,
  malformed_complex,
  non_monotone,
  excluded_replicates,
  config,
  io,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::sizing: return "sizing";
    case errc::margin: return "margin";
    case errc::geometry: return "geometry";
    case errc::intensity_unavailable: return "intensity_unavailable";
    case errc::insufficient_conditioning: return "insufficient_conditioning";
    case errc::degenerate: return "degenerate";
    case errc::cap_exceeded: return "cap_exceeded";
    case errc::malformed_complex: return "malformed_complex";
    case errc::non_monotone: return "non_monotone";
    case errc::excluded_replicates: return "excluded_replicates";
    case errc::config: return "config";
    case errc::io: return "io";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace rgc
