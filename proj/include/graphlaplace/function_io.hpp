#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "graphlaplace/function_space.hpp"

namespace graphlaplace {

/// Shortest-round-trip-safe decimal rendering (%.17g).
std::string format_double(double x);

/// Sampled-function CSV: header `edge_id,t,value`, one row per grid node.
/// Each edge needs its own uniform grid covering [0, l_e], rows in
/// ascending t; edge_id is the edge name from the graph spec.
PiecewiseFunction parse_function_csv(const MetricGraph& g, std::string_view text,
                                     const std::string& source = "<string>");
PiecewiseFunction load_function_csv(const MetricGraph& g, const std::filesystem::path& path);

/// Evaluates f on `nodes_per_edge` equally spaced points of every edge.
std::string function_csv(const MetricGraph& g, const PiecewiseFunction& f, std::size_t nodes_per_edge);

}  // namespace graphlaplace
