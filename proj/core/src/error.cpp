#include "t3f/error.hpp"

namespace t3f {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRangeNode: return "OutOfRangeNode";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyEventList: return "EmptyEventList";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptyTimesteps: return "EmptyTimesteps";
    case ErrorCode::InvalidWindowSpec: return "InvalidWindowSpec";
    case ErrorCode::MissingEdgeValue: return "MissingEdgeValue";
    case ErrorCode::EmptyThresholds: return "EmptyThresholds";
    case ErrorCode::ThresholdMismatch: return "ThresholdMismatch";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::TooFewGraphs: return "TooFewGraphs";
    case ErrorCode::InfeasibleK: return "InfeasibleK";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::NonFiniteLoss:
      return ErrorClass::Numerical;
    case ErrorCode::InvalidWindowSpec:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSpec:
      return ErrorClass::Usage;
    default:
      return ErrorClass::Data;
  }
}

}  // namespace t3f
