#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evchar {

enum class ErrorCode {
  EmptyInput,
  NonFiniteInput,
  NonPositiveObservation,
  SampleTooSmall,
  InvalidSchedule,
  DegenerateSchedule,
  IndexOutOfRange,
  KTooSmall,
  DegenerateSample,
  ZeroSpread,
  EndpointBelowMaximum,
  UnknownModel,
  InvalidParameter,
  BeyondEndpoint,
  VanishingTail,
  QuadratureFailure,
  OutOfBand,
  InsufficientData,
  InvalidTolerances,
  InvalidExperiment,
  EmptyResults,
  ParseError,
  IoError,
  SpecMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a typed code so callers
// (the harness, the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evchar
