#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphlaplace/metric_graph.hpp"
#include "graphlaplace/vertex_conditions.hpp"

namespace graphlaplace {

struct CheckResult {
  std::string module;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyOptions {
  double kappa = 1.0;
  std::size_t n = 80;           // eigenpairs for the spectral surveys
  std::size_t triples = 200;    // random point triples for the metric axioms
  std::size_t samples = 2000;   // Monte Carlo samples for the covariance check
  std::uint64_t seed = 0;
};

/// Runs the invariant suite of every module on one graph and returns one
/// row per check.
std::vector<CheckResult> verify_suite(const MetricGraph& g, const VertexConditionSet& conds,
                                      const VerifyOptions& opt = {});

}  // namespace graphlaplace
