#pragma once

#include <string>
#include <vector>

#include "graphlaplace/metric_graph.hpp"

namespace graphlaplace {

enum class VertexConditionKind { Kirchhoff, Dirichlet, Robin };

/// Kirchhoff: continuity + sum of inward derivatives = 0.
/// Dirichlet: u(v) = 0.
/// Robin: continuity + sum of inward derivatives = weight * u(v), weight >= 0.
struct VertexCondition {
  VertexConditionKind kind = VertexConditionKind::Kirchhoff;
  double weight = 0.0;

  static VertexCondition kirchhoff() { return {}; }
  static VertexCondition dirichlet() { return {VertexConditionKind::Dirichlet, 0.0}; }
  static VertexCondition robin(double w);

  friend bool operator==(const VertexCondition&, const VertexCondition&) = default;
};

std::string describe(const VertexCondition& c);

class VertexConditionSet {
 public:
  VertexConditionSet() = default;
  explicit VertexConditionSet(std::size_t vertex_count) : conds_(vertex_count) {}

  static VertexConditionSet all_kirchhoff(const MetricGraph& g) { return VertexConditionSet(g.vertex_count()); }
  static VertexConditionSet all_dirichlet(const MetricGraph& g);

  /// Robin with zero weight is stored as Kirchhoff; negative weights throw.
  void set(VertexId v, VertexCondition c);
  const VertexCondition& at(VertexId v) const { return conds_.at(v); }
  std::size_t size() const noexcept { return conds_.size(); }

  bool is_dirichlet(VertexId v) const { return at(v).kind == VertexConditionKind::Dirichlet; }
  bool has_dirichlet() const;
  bool has_robin() const;
  std::vector<VertexId> dirichlet_vertices() const;

  /// Throws unless the set covers exactly the graph's vertices.
  void check_against(const MetricGraph& g) const;

 private:
  std::vector<VertexCondition> conds_;
};

}  // namespace graphlaplace
