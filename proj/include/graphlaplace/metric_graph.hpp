#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graphlaplace {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// Which end of an edge, in the stored (forward) orientation u -> v.
enum class EdgeEnd { Start, End };

struct EdgeSpec {
  std::string id;
  std::string u;
  std::string v;
  double length = 0.0;
};

/// Flat edge-list description of a graph; vertices are glued by shared ids.
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
};

struct Edge {
  std::string name;
  VertexId tail = 0;  // vertex at t = 0
  VertexId head = 0;  // vertex at t = length
  double length = 0.0;

  bool is_loop() const noexcept { return tail == head; }
};

/// A direction slot (e, zeta) in Dir(v): the edge together with the
/// natural parameterization that starts at v.
struct DirectionSlot {
  EdgeId edge = 0;
  EdgeEnd end = EdgeEnd::Start;

  friend bool operator==(const DirectionSlot&, const DirectionSlot&) = default;
};

/// Location on the graph: edge plus arclength coordinate in [0, l_e],
/// measured in the stored orientation.
struct GraphPoint {
  EdgeId edge = 0;
  double t = 0.0;
};

/// One direction per edge. `flipped(e)` means the coordinate runs from the
/// stored head to the stored tail, i.e. t -> l_e - t.
class Parameterization {
 public:
  Parameterization() = default;
  explicit Parameterization(std::size_t edge_count) : flipped_(edge_count, false) {}
  Parameterization(std::vector<bool> flipped) : flipped_(std::move(flipped)) {}

  static Parameterization forward(std::size_t edge_count) { return Parameterization(edge_count); }

  bool flipped(EdgeId e) const { return e < flipped_.size() && flipped_[e]; }
  void set_flipped(EdgeId e, bool value);
  Parameterization with_flip(EdgeId e) const;
  std::size_t size() const noexcept { return flipped_.size(); }

 private:
  std::vector<bool> flipped_;
};

class MetricGraph {
 public:
  /// Validates the spec (positive finite lengths, known endpoints,
  /// connectedness) and precomputes degrees and vertex distances.
  static MetricGraph build(const GraphSpec& spec);

  std::size_t vertex_count() const noexcept { return vertex_names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }

  std::optional<VertexId> find_vertex(std::string_view name) const;
  std::optional<EdgeId> find_edge(std::string_view name) const;

  VertexId endpoint(EdgeId e, EdgeEnd end) const;
  std::span<const DirectionSlot> slots(VertexId v) const { return slots_.at(v); }
  std::size_t degree(VertexId v) const { return slots_.at(v).size(); }

  double total_length() const noexcept { return total_length_; }
  double max_edge_length() const noexcept { return max_length_; }
  double min_edge_length() const noexcept { return min_length_; }

  /// Exact all-pairs shortest-path distances between vertices.
  const Eigen::MatrixXd& vertex_distances() const noexcept { return vertex_distance_; }

  /// Geodesic distance between two points of the graph.
  double distance(const GraphPoint& x, const GraphPoint& y) const;

  /// Distance from a point to one end of its own edge, along that edge.
  double distance_to_end(const GraphPoint& x, EdgeEnd end) const;

  /// n equally spaced points on edge e, both endpoints included.
  std::vector<GraphPoint> edge_grid(EdgeId e, std::size_t n) const;

  /// Throws PointOutOfRange unless 0 <= t <= l_e (up to rounding).
  void check_point(const GraphPoint& x) const;

  /// A point representing vertex v (the first incident slot's endpoint).
  GraphPoint vertex_point(VertexId v) const;

  /// Point on the slot's edge at distance s from the slot's vertex.
  GraphPoint point_along(const DirectionSlot& slot, double s) const;

 private:
  std::vector<std::string> vertex_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<DirectionSlot>> slots_;
  Eigen::MatrixXd vertex_distance_;
  double total_length_ = 0.0;
  double max_length_ = 0.0;
  double min_length_ = 0.0;
};

/// Free-function spelling of the table accessor.
inline const Eigen::MatrixXd& vertex_distance_table(const MetricGraph& g) { return g.vertex_distances(); }

inline double geodesic_distance(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y) {
  return g.distance(x, y);
}

}  // namespace graphlaplace
