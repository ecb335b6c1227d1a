#include "tws/error.hpp"

namespace tws {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegeneratePath: return "DegeneratePath";
    case ErrorCode::NonHorizontalPath: return "NonHorizontalPath";
    case ErrorCode::GainBelowOne: return "GainBelowOne";
    case ErrorCode::CabinDoesNotFit: return "CabinDoesNotFit";
    case ErrorCode::NotInCabin: return "NotInCabin";
    case ErrorCode::HeadOutsideCabin: return "HeadOutsideCabin";
    case ErrorCode::NotOnPlatform: return "NotOnPlatform";
    case ErrorCode::TunnelAlreadyActive: return "TunnelAlreadyActive";
    case ErrorCode::CooldownActive: return "CooldownActive";
    case ErrorCode::PlayspaceTooSmall: return "PlayspaceTooSmall";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Simulation: return "Simulation";
    case ErrorCode::CorruptTrace: return "CorruptTrace";
    case ErrorCode::SeedMismatch: return "SeedMismatch";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tws
