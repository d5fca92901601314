#ifndef OPTPUMP_ERROR_HPP
#define OPTPUMP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace optpump {

enum class Errc {
  NonPositiveSize,
  NegativeRate,
  LengthMismatch,
  OutOfRange,
  DimensionMismatch,
  DimensionTooLarge,
  VectorizationMismatch,
  SolverFailure,
  EmptySpectrum,
  DegenerateSteadySpace,
  DegenerateLoop,
  UnsupportedChannel,
  UnsupportedParameters,
  InvalidSectorPair,
  BranchUnresolved,
  IllConditionedBasis,
  StepSizeUnderflow,
  WindowNotReached,
  InvalidArgument,
  IoError,
  ConfigError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveSize: return "NonPositiveSize";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::VectorizationMismatch: return "VectorizationMismatch";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::EmptySpectrum: return "EmptySpectrum";
    case Errc::DegenerateSteadySpace: return "DegenerateSteadySpace";
    case Errc::DegenerateLoop: return "DegenerateLoop";
    case Errc::UnsupportedChannel: return "UnsupportedChannel";
    case Errc::UnsupportedParameters: return "UnsupportedParameters";
    case Errc::InvalidSectorPair: return "InvalidSectorPair";
    case Errc::BranchUnresolved: return "BranchUnresolved";
    case Errc::IllConditionedBasis: return "IllConditionedBasis";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    case Errc::WindowNotReached: return "WindowNotReached";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace optpump

#endif  // OPTPUMP_ERROR_HPP
