#include "graphlaplace/vertex_conditions.hpp"

#include <cmath>
#include <sstream>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

VertexCondition VertexCondition::robin(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    std::ostringstream os;
    os << "Robin weight " << w << " rejected; only finite w >= 0 keeps the operator positive";
    throw Error(ErrorCode::NegativeRobinWeight, "spectral", os.str());
  }
  if (w == 0.0) return kirchhoff();
  return {VertexConditionKind::Robin, w};
}

std::string describe(const VertexCondition& c) {
  switch (c.kind) {
    case VertexConditionKind::Kirchhoff: return "kirchhoff";
    case VertexConditionKind::Dirichlet: return "dirichlet";
    case VertexConditionKind::Robin: {
      std::ostringstream os;
      os.precision(17);
      os << "robin(" << c.weight << ")";
      return os.str();
    }
  }
  return "?";
}

VertexConditionSet VertexConditionSet::all_dirichlet(const MetricGraph& g) {
  VertexConditionSet s(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) s.set(v, VertexCondition::dirichlet());
  return s;
}

void VertexConditionSet::set(VertexId v, VertexCondition c) {
  if (c.kind == VertexConditionKind::Robin) c = VertexCondition::robin(c.weight);
  if (v >= conds_.size()) conds_.resize(v + 1);
  conds_[v] = c;
}

bool VertexConditionSet::has_dirichlet() const {
  for (const auto& c : conds_) {
    if (c.kind == VertexConditionKind::Dirichlet) return true;
  }
  return false;
}

bool VertexConditionSet::has_robin() const {
  for (const auto& c : conds_) {
    if (c.kind == VertexConditionKind::Robin) return true;
  }
  return false;
}

std::vector<VertexId> VertexConditionSet::dirichlet_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < conds_.size(); ++v) {
    if (is_dirichlet(v)) out.push_back(v);
  }
  return out;
}

void VertexConditionSet::check_against(const MetricGraph& g) const {
  if (conds_.size() != g.vertex_count()) {
    throw Error(ErrorCode::BadArgument, "spectral",
                "vertex condition set covers " + std::to_string(conds_.size()) + " vertices, graph has " +
                    std::to_string(g.vertex_count()));
  }
}

}  // namespace graphlaplace
