#include "evchar/error.hpp"

namespace evchar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonPositiveObservation: return "NonPositiveObservation";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::DegenerateSchedule: return "DegenerateSchedule";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::ZeroSpread: return "ZeroSpread";
    case ErrorCode::EndpointBelowMaximum: return "EndpointBelowMaximum";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::BeyondEndpoint: return "BeyondEndpoint";
    case ErrorCode::VanishingTail: return "VanishingTail";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::OutOfBand: return "OutOfBand";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidTolerances: return "InvalidTolerances";
    case ErrorCode::InvalidExperiment: return "InvalidExperiment";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
  }
  return "Unknown";
}

}  // namespace evchar
