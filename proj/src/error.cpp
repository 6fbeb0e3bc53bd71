#include "citits/error.hpp"

namespace citits {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RoadMismatch: return "RoadMismatch";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::EmptyRoadList: return "EmptyRoadList";
    case ErrorCode::EmptyStopList: return "EmptyStopList";
    case ErrorCode::UnknownDestination: return "UnknownDestination";
    case ErrorCode::NoRouteFound: return "NoRouteFound";
    case ErrorCode::NoBusAvailable: return "NoBusAvailable";
    case ErrorCode::StaleFix: return "StaleFix";
    case ErrorCode::ScoreSetMismatch: return "ScoreSetMismatch";
    case ErrorCode::UnknownRoad: return "UnknownRoad";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DuplicateUsername: return "DuplicateUsername";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::IngestMissingFrame: return "IngestMissingFrame";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace citits
