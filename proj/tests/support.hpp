#pragma once

#include <cmath>
#include <string>

#include "graphlaplace/graph_io.hpp"

namespace test_support {

inline graphlaplace::GraphFile shipped(const std::string& name) {
  return graphlaplace::load_graph_file(std::string(GRAPHLAPLACE_DATA_DIR) + "/graphs/" + name + ".json");
}

inline graphlaplace::GraphFile inline_graph(const std::string& json) { return graphlaplace::parse_graph_file(json); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace test_support
