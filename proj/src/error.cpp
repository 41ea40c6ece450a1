#include "graphlaplace/error.hpp"

namespace graphlaplace {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::PointOutOfRange: return "PointOutOfRange";
    case ErrorCode::BadGridSize: return "BadGridSize";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::CriticalExponent: return "CriticalExponent";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::RootScanExhausted: return "RootScanExhausted";
    case ErrorCode::IllConditionedCluster: return "IllConditionedCluster";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::NegativeRobinWeight: return "NegativeRobinWeight";
    case ErrorCode::NonPositiveOperator: return "NonPositiveOperator";
    case ErrorCode::FEMUnsupportedOrder: return "FEMUnsupportedOrder";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InsufficientDecay: return "InsufficientDecay";
    case ErrorCode::ExceptionalOrder: return "ExceptionalOrder";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

}  // namespace graphlaplace
