#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphlaplace/metric_graph.hpp"

namespace graphlaplace {

/// Closed-form edge function: returns the order-th derivative with respect
/// to the stored (forward) coordinate t.
using EdgeEvaluator = std::function<double(double t, unsigned order)>;

/// Values on a uniform grid of the edge, both endpoints included. The two
/// endpoint values belong to this edge's direction slots, so a sampled
/// function may be discontinuous across vertices.
struct SampledEdge {
  std::vector<double> values;
};

struct AnalyticEdge {
  EdgeEvaluator eval;
};

/// A function on the disjoint union of the edges. Evaluation at an edge
/// endpoint is one-sided: it uses that edge's own representation.
class PiecewiseFunction {
 public:
  using EdgeRep = std::variant<SampledEdge, AnalyticEdge>;

  PiecewiseFunction() = default;
  PiecewiseFunction(std::vector<double> lengths, std::vector<EdgeRep> reps);

  static PiecewiseFunction sampled(const MetricGraph& g, std::vector<std::vector<double>> values);
  static PiecewiseFunction analytic(const MetricGraph& g, std::vector<EdgeEvaluator> evals);
  /// Samples fn(e, t) on an n-node grid of every edge.
  static PiecewiseFunction sample(const MetricGraph& g, const std::function<double(EdgeId, double)>& fn,
                                  std::size_t nodes_per_edge);
  static PiecewiseFunction constant(const MetricGraph& g, double c);
  /// 1 on edge e (endpoints included, from e's side), 0 on every other edge.
  static PiecewiseFunction edge_indicator(const MetricGraph& g, EdgeId e);

  std::size_t edge_count() const noexcept { return lengths_.size(); }
  double length(EdgeId e) const { return lengths_.at(e); }
  const EdgeRep& rep(EdgeId e) const { return reps_.at(e); }
  bool is_sampled(EdgeId e) const { return std::holds_alternative<SampledEdge>(reps_.at(e)); }
  bool any_sampled() const;
  /// Grid spacing of a sampled edge (0 for analytic edges).
  double spacing(EdgeId e) const;

  /// Forward-coordinate derivative of the given order at t on edge e.
  /// Sampled edges use linear interpolation for order 0 and Fornberg
  /// stencils (one-sided near endpoints) for higher orders.
  double derivative(EdgeId e, double t, unsigned order) const;
  double value(EdgeId e, double t) const { return derivative(e, t, 0); }

  /// Pointwise linear combination a*f + b*g (same edges required).
  friend PiecewiseFunction combine(double a, const PiecewiseFunction& f, double b, const PiecewiseFunction& g);

 private:
  std::vector<double> lengths_;
  std::vector<EdgeRep> reps_;
};

/// Composite Gauss quadrature settings and the singular double-integral
/// refinement schedule used by the Slobodeckij seminorm.
struct QuadratureConfig {
  std::size_t panels = 8;       // uniform panels per edge
  std::size_t gauss_nodes = 8;  // nodes per panel
  double band = 0.05;           // initial excluded band width (arclength)
  double refinement = 2.0;      // band shrink factor per level
  std::size_t levels = 8;       // number of band widths evaluated
  double rel_tol = 1e-3;

  void validate() const;
};

double evaluate(const MetricGraph& g, const PiecewiseFunction& f, const GraphPoint& x);

/// D_eta^j f at x: negated for odd j when eta flips x's edge.
double edge_derivative(const MetricGraph& g, const PiecewiseFunction& f, const GraphPoint& x, unsigned order,
                       const Parameterization& eta = {});

/// One-sided derivative into the edge along the slot's parameterization.
double directional_derivative_at_vertex(const MetricGraph& g, const PiecewiseFunction& f, VertexId v,
                                        const DirectionSlot& slot, unsigned order = 1);

/// |sum over Dir(v) of inward derivatives|.
double kirchhoff_residual(const MetricGraph& g, const PiecewiseFunction& f, VertexId v);

/// Largest difference between one-sided even-order derivative values over
/// the direction slots at v. Odd orders are rejected.
double vertex_jump(const MetricGraph& g, const PiecewiseFunction& f, VertexId v, unsigned order = 0);

/// Integral over the graph of fn(e, t) using panels aligned to any sampled
/// grid (else cfg.panels) and cfg.gauss_nodes nodes per panel.
double integrate(const PiecewiseFunction& layout, const std::function<double(EdgeId, double)>& fn,
                 const QuadratureConfig& cfg = {});

double inner_product(const PiecewiseFunction& f, const PiecewiseFunction& h, const QuadratureConfig& cfg = {});

/// L_p norm for p in [1, inf]; p = inf (use std::numeric_limits) is the max
/// over the sampling grid (a 1025-point grid for analytic edges).
double lp_norm(const PiecewiseFunction& f, double p, const QuadratureConfig& cfg = {}, unsigned order = 0);

struct SeminormResult {
  double value = 0.0;             // extrapolated when converged, last raw value otherwise
  bool converged = false;
  double growth_exponent = 0.0;   // a in value^p ~ band^(-a); positive means divergent
  std::vector<double> bands;      // band widths used
  std::vector<double> raw;        // |f|^p at each band width
};

/// Slobodeckij seminorm over the whole graph with the geodesic kernel:
/// (int int |D^k f(x) - D^k f(y)|^p / d(x,y)^(1 + gamma p) dx dy)^(1/p),
/// with pairs closer than the band excluded and the band refined to zero.
/// Divergence is reported through `converged` and `growth_exponent`.
SeminormResult slobodeckij_seminorm(const MetricGraph& g, const PiecewiseFunction& f, double gamma, double p,
                                    const QuadratureConfig& cfg = {}, unsigned derivative_order = 0,
                                    const Parameterization& eta = {});

/// Edge-local seminorm |D^k f|_{gamma,p,e} with the interval kernel |t - s|.
SeminormResult edge_slobodeckij_seminorm(const PiecewiseFunction& f, EdgeId e, double gamma, double p,
                                         const QuadratureConfig& cfg = {}, unsigned derivative_order = 0);

struct SobolevNorm {
  double value = 0.0;
  bool converged = true;
  double edge_part = 0.0;    // sum over edges of ||f||_{W(e)}^p
  double global_part = 0.0;  // |D^{2 floor(floor(alpha)/2)} f|_{alpha - floor(alpha), p}^p
};

/// W^{alpha,p}(graph) norm: edgewise Sobolev-Slobodeckij norms plus the
/// graph-global seminorm of the highest even derivative.
SobolevNorm sobolev_norm_W(const MetricGraph& g, const PiecewiseFunction& f, double alpha, double p,
                           const Parameterization& eta = {}, const QuadratureConfig& cfg = {});

struct VertexJumpEntry {
  VertexId vertex = 0;
  unsigned order = 0;
  double jump = 0.0;
  double tolerance = 0.0;
};

struct MembershipReport {
  double alpha = 0.0;
  double p = 0.0;
  int continuity_order = -2;            // 2 floor(alpha/2 - 1/(2p)); -2 means none required
  std::vector<double> edge_norms;       // ||f||_{W^{alpha,p}(e)}
  std::vector<bool> edge_finite;
  std::vector<VertexJumpEntry> jumps;
  std::optional<SeminormResult> global_seminorm;
  bool consistent = false;

  std::string to_text(const MetricGraph& g) const;
};

/// Numerical membership diagnostics for W^{alpha,p}(graph): edgewise norm
/// finiteness, even-order vertex continuity up to the characterization
/// order, and convergence of the global seminorm.
MembershipReport membership_report_W(const MetricGraph& g, const PiecewiseFunction& f, double alpha, double p,
                                     const QuadratureConfig& cfg = {},
                                     std::optional<double> jump_tolerance = std::nullopt);

/// Default jump tolerance at v: 1e-7 for closed forms, 10 h for grids.
double default_jump_tolerance(const MetricGraph& g, const PiecewiseFunction& f, VertexId v);

}  // namespace graphlaplace
