#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "graphlaplace/metric_graph.hpp"
#include "graphlaplace/vertex_conditions.hpp"

namespace graphlaplace {

/// Parsed graph spec file.
///
/// Schema (JSON):
///
///     {
///       "vertices": ["a", "b", ...],            // strings or integers
///       "edges": [{"id": "e0", "u": "a", "v": "b", "length": 1.0}, ...],
///       "vertex_conditions": {"a": "kirchhoff", "b": "dirichlet",
///                             "c": {"robin": 0.5}}   // optional
///     }
///
/// Vertices missing from "vertex_conditions" default to Kirchhoff.
struct GraphFile {
  GraphSpec spec;
  MetricGraph graph;
  VertexConditionSet conditions;
};

/// Parses and validates. Syntax errors cite line and column; schema errors
/// cite the offending field path (e.g. "edges[2].length").
GraphFile parse_graph_file(std::string_view text, const std::string& source = "<string>");
GraphFile load_graph_file(const std::filesystem::path& path);

/// Canonical JSON rendering of a graph + conditions (round-trips through
/// parse_graph_file).
std::string to_json(const MetricGraph& g, const VertexConditionSet& conds);

}  // namespace graphlaplace
