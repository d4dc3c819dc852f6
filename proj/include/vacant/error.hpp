#pragma once

#include <stdexcept>
#include <string>

namespace vacant {

enum class errc {
  invalid_argument,
  budget_exceeded,
  pole_proximity,
  floor_violation,
  degenerate_spectrum,
  bracket_failure,
  non_convergence,
  dimension_unsupported,
};

inline const char* to_string(errc code) {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::pole_proximity: return "PoleProximity";
    case errc::floor_violation: return "FloorViolation";
    case errc::degenerate_spectrum: return "DegenerateSpectrum";
    case errc::bracket_failure: return "BracketFailure";
    case errc::non_convergence: return "NonConvergence";
    case errc::dimension_unsupported: return "DimensionUnsupported";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(errc::invalid_argument, what);
}

}  // namespace vacant
