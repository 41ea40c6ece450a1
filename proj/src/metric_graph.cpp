#include "graphlaplace/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "metric_graph";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

}  // namespace

void Parameterization::set_flipped(EdgeId e, bool value) {
  if (e >= flipped_.size()) flipped_.resize(e + 1, false);
  flipped_[e] = value;
}

Parameterization Parameterization::with_flip(EdgeId e) const {
  Parameterization p = *this;
  p.set_flipped(e, !flipped(e));
  return p;
}

MetricGraph MetricGraph::build(const GraphSpec& spec) {
  if (spec.edges.empty()) fail(ErrorCode::EmptyGraph, "graph spec has no edges");

  MetricGraph g;
  std::unordered_map<std::string, VertexId> index;
  for (const auto& name : spec.vertices) {
    if (!index.emplace(name, g.vertex_names_.size()).second) {
      fail(ErrorCode::ConfigParse, "duplicate vertex id '" + name + "'");
    }
    g.vertex_names_.push_back(name);
  }

  std::unordered_map<std::string, EdgeId> edge_names;
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    const EdgeSpec& es = spec.edges[k];
    std::string name = es.id.empty() ? "e" + std::to_string(k) : es.id;
    if (!edge_names.emplace(name, k).second) {
      fail(ErrorCode::ConfigParse, "duplicate edge id '" + name + "'");
    }
    if (!(es.length > 0.0) || !std::isfinite(es.length)) {
      std::ostringstream os;
      os << "edge '" << name << "' has length " << es.length << "; lengths must be positive and finite";
      fail(ErrorCode::NonPositiveLength, os.str());
    }
    auto u = index.find(es.u);
    auto v = index.find(es.v);
    if (u == index.end() || v == index.end()) {
      fail(ErrorCode::DanglingEndpoint, "edge '" + name + "' references unknown vertex '" +
                                            (u == index.end() ? es.u : es.v) + "'");
    }
    g.edges_.push_back(Edge{name, u->second, v->second, es.length});
  }

  const std::size_t nv = g.vertex_names_.size();
  g.slots_.assign(nv, {});
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    g.slots_[g.edges_[e].tail].push_back({e, EdgeEnd::Start});
    g.slots_[g.edges_[e].head].push_back({e, EdgeEnd::End});
  }

  // Floyd-Warshall; loops never shorten a vertex-to-vertex path.
  constexpr double inf = std::numeric_limits<double>::infinity();
  g.vertex_distance_ = Eigen::MatrixXd::Constant(nv, nv, inf);
  for (VertexId v = 0; v < nv; ++v) g.vertex_distance_(v, v) = 0.0;
  for (const Edge& e : g.edges_) {
    if (e.is_loop()) continue;
    double& d = g.vertex_distance_(e.tail, e.head);
    d = std::min(d, e.length);
    g.vertex_distance_(e.head, e.tail) = d;
  }
  for (std::size_t k = 0; k < nv; ++k) {
    for (std::size_t i = 0; i < nv; ++i) {
      const double dik = g.vertex_distance_(i, k);
      if (dik == inf) continue;
      for (std::size_t j = 0; j < nv; ++j) {
        const double via = dik + g.vertex_distance_(k, j);
        if (via < g.vertex_distance_(i, j)) g.vertex_distance_(i, j) = via;
      }
    }
  }
  for (VertexId v = 0; v < nv; ++v) {
    if (g.vertex_distance_(0, v) == inf) {
      fail(ErrorCode::DisconnectedGraph,
           "vertex '" + g.vertex_names_[v] + "' is not reachable from '" + g.vertex_names_[0] + "'");
    }
  }

  g.total_length_ = 0.0;
  g.max_length_ = 0.0;
  g.min_length_ = inf;
  for (const Edge& e : g.edges_) {
    g.total_length_ += e.length;
    g.max_length_ = std::max(g.max_length_, e.length);
    g.min_length_ = std::min(g.min_length_, e.length);
  }
  return g;
}

std::optional<VertexId> MetricGraph::find_vertex(std::string_view name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) return std::nullopt;
  return static_cast<VertexId>(it - vertex_names_.begin());
}

std::optional<EdgeId> MetricGraph::find_edge(std::string_view name) const {
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (edges_[e].name == name) return e;
  }
  return std::nullopt;
}

VertexId MetricGraph::endpoint(EdgeId e, EdgeEnd end) const {
  const Edge& ed = edges_.at(e);
  return end == EdgeEnd::Start ? ed.tail : ed.head;
}

void MetricGraph::check_point(const GraphPoint& x) const {
  if (x.edge >= edges_.size()) {
    fail(ErrorCode::PointOutOfRange, "edge index " + std::to_string(x.edge) + " does not exist");
  }
  const double l = edges_[x.edge].length;
  const double slack = 1e-12 * l;
  if (!(x.t >= -slack && x.t <= l + slack)) {
    std::ostringstream os;
    os << "coordinate t=" << x.t << " outside [0, " << l << "] on edge '" << edges_[x.edge].name << "'";
    fail(ErrorCode::PointOutOfRange, os.str());
  }
}

double MetricGraph::distance_to_end(const GraphPoint& x, EdgeEnd end) const {
  const double l = edges_[x.edge].length;
  const double t = std::clamp(x.t, 0.0, l);
  return end == EdgeEnd::Start ? t : l - t;
}

double MetricGraph::distance(const GraphPoint& x, const GraphPoint& y) const {
  check_point(x);
  check_point(y);
  double best = std::numeric_limits<double>::infinity();
  if (x.edge == y.edge) best = std::abs(std::clamp(x.t, 0.0, edges_[x.edge].length) -
                                        std::clamp(y.t, 0.0, edges_[y.edge].length));
  for (EdgeEnd a : {EdgeEnd::Start, EdgeEnd::End}) {
    const double da = distance_to_end(x, a);
    const VertexId va = endpoint(x.edge, a);
    for (EdgeEnd b : {EdgeEnd::Start, EdgeEnd::End}) {
      const double route = da + vertex_distance_(va, endpoint(y.edge, b)) + distance_to_end(y, b);
      best = std::min(best, route);
    }
  }
  return best;
}

std::vector<GraphPoint> MetricGraph::edge_grid(EdgeId e, std::size_t n) const {
  if (e >= edges_.size()) fail(ErrorCode::PointOutOfRange, "edge index out of range");
  if (n < 2) fail(ErrorCode::BadGridSize, "edge grid needs at least 2 nodes, got " + std::to_string(n));
  const double l = edges_[e].length;
  std::vector<GraphPoint> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k] = {e, k + 1 == n ? l : l * static_cast<double>(k) / static_cast<double>(n - 1)};
  }
  return pts;
}

GraphPoint MetricGraph::vertex_point(VertexId v) const {
  const DirectionSlot& s = slots_.at(v).front();
  return {s.edge, s.end == EdgeEnd::Start ? 0.0 : edges_[s.edge].length};
}

GraphPoint MetricGraph::point_along(const DirectionSlot& slot, double s) const {
  const double l = edges_.at(slot.edge).length;
  return {slot.edge, slot.end == EdgeEnd::Start ? s : l - s};
}

}  // namespace graphlaplace
