#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphlaplace {

enum class ErrorCode {
  // metric_graph
  NonPositiveLength,
  DisconnectedGraph,
  DanglingEndpoint,
  PointOutOfRange,
  BadGridSize,
  EmptyGraph,
  // function_space
  InsufficientGrid,
  BadGamma,
  CriticalExponent,
  BadArgument,
  // spectral
  RootScanExhausted,
  IllConditionedCluster,
  MeshTooCoarse,
  NonPositiveCoefficient,
  NegativeRobinWeight,
  NonPositiveOperator,
  FEMUnsupportedOrder,
  SingularSystem,
  // fractional
  QuadratureFailure,
  InsufficientDecay,
  ExceptionalOrder,
  // sampler
  TooFewSamples,
  // cli / io
  ConfigParse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code plus the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(message), code_(code), module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace graphlaplace
