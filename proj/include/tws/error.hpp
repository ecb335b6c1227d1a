#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tws {

enum class ErrorCode {
  InvalidArgument,
  DegeneratePath,
  NonHorizontalPath,
  GainBelowOne,
  CabinDoesNotFit,
  NotInCabin,
  HeadOutsideCabin,
  NotOnPlatform,
  TunnelAlreadyActive,
  CooldownActive,
  PlayspaceTooSmall,
  Config,
  Simulation,
  CorruptTrace,
  SeedMismatch,
  ScenarioMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `line()` is set for trace parse
/// errors (1-based), zero otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace tws
