#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace t3f {

enum class ErrorCode {
  // temporal_graph
  OutOfRangeNode,
  SelfLoop,
  EmptyEventList,
  EmptyGraph,
  EmptyTimesteps,
  InvalidWindowSpec,
  // topology
  MissingEdgeValue,
  EmptyThresholds,
  ThresholdMismatch,
  // spectral
  EmptyWindow,
  NonConvergence,
  EmptySpectrum,
  BinMismatch,
  // neural
  ShapeMismatch,
  NonFiniteValue,
  // pipeline
  ParseError,
  LabelOutOfRange,
  MissingManifest,
  InvalidSpec,
  InvalidConfig,
  NonFiniteLoss,
  TooFewGraphs,
  // stability
  InfeasibleK,
};

std::string_view to_string(ErrorCode code) noexcept;

// Coarse classes used for process exit codes: 2 data error, 3 numerical failure.
enum class ErrorClass { Usage = 1, Data = 2, Numerical = 3 };

ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the file readers; carries the offending location.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace t3f
