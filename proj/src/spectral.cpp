#include "graphlaplace/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "spectral";
constexpr std::size_t kCoefficientSamples = 257;

double sampled_min(const MetricGraph& g, const PiecewiseFunction& f) {
  double m = std::numeric_limits<double>::infinity();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double l = g.edge(e).length;
    for (std::size_t k = 0; k < kCoefficientSamples; ++k) {
      m = std::min(m, f.value(e, l * static_cast<double>(k) / (kCoefficientSamples - 1)));
    }
  }
  return m;
}

double vertex_flux_residual(const SpectralBasis& b, const PiecewiseFunction& f, VertexId v) {
  const VertexCondition& c = b.conditions.at(v);
  const auto slots = b.graph.slots(v);
  if (c.kind == VertexConditionKind::Dirichlet) {
    double r = 0.0;
    for (const auto& s : slots) r = std::max(r, std::abs(directional_derivative_at_vertex(b.graph, f, v, s, 0)));
    return r;
  }
  double flux = 0.0;
  for (const auto& s : slots) {
    const double t = s.end == EdgeEnd::Start ? 0.0 : b.graph.edge(s.edge).length;
    flux += b.coefficients.a.value(s.edge, t) * directional_derivative_at_vertex(b.graph, f, v, s, 1);
  }
  if (c.kind == VertexConditionKind::Robin) flux -= c.weight * directional_derivative_at_vertex(b.graph, f, v, slots[0], 0);
  return std::abs(flux);
}

}  // namespace

CoefficientField CoefficientField::constant(const MetricGraph& g, double kappa, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::NonPositiveCoefficient, kModule, "a must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::NonPositiveCoefficient, kModule, "kappa must be >= 0");
  }
  CoefficientField c;
  c.kappa2 = PiecewiseFunction::constant(g, kappa * kappa);
  c.a = PiecewiseFunction::constant(g, a);
  c.kappa2_min = kappa * kappa;
  c.a_min = a;
  c.lipschitz = true;
  c.a_lipschitz = 0.0;
  c.constant_kappa = kappa;
  c.constant_a = a;
  return c;
}

CoefficientField CoefficientField::make(const MetricGraph& g, PiecewiseFunction kappa2, PiecewiseFunction a,
                                        bool lipschitz) {
  if (kappa2.edge_count() != g.edge_count() || a.edge_count() != g.edge_count()) {
    throw Error(ErrorCode::BadArgument, kModule, "coefficient field does not match the graph");
  }
  CoefficientField c;
  c.kappa2 = std::move(kappa2);
  c.a = std::move(a);
  c.kappa2_min = sampled_min(g, c.kappa2);
  c.a_min = sampled_min(g, c.a);
  if (!(c.a_min > 0.0)) throw Error(ErrorCode::NonPositiveCoefficient, kModule, "inf a must be positive");
  if (c.kappa2_min < 0.0) throw Error(ErrorCode::NonPositiveCoefficient, kModule, "kappa^2 must be >= 0");
  c.lipschitz = lipschitz;
  if (lipschitz) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const double l = g.edge(e).length, dt = l / (kCoefficientSamples - 1);
      for (std::size_t k = 0; k + 1 < kCoefficientSamples; ++k) {
        const double t = dt * static_cast<double>(k);
        c.a_lipschitz = std::max(c.a_lipschitz, std::abs(c.a.value(e, t + dt) - c.a.value(e, t)) / dt);
      }
    }
  }
  return c;
}

double SpectralBasis::lambda_hat(std::size_t i) const {
  if (path == SolverPath::FEM && !coefficients.constant_kappa) {
    throw Error(ErrorCode::BadArgument, kModule, "lambda_hat needs a constant kappa");
  }
  return lambda(i) - kappa * kappa;
}

double SpectralBasis::derivative(std::size_t i, const GraphPoint& x, unsigned order, const Parameterization& eta) const {
  graph.check_point(x);
  if (path == SolverPath::FEM) return edge_derivative(graph, phi(i), x, order, eta);
  const double d = modes.at(i)[x.edge].derivative(x.t, order);
  return (order % 2 == 1 && eta.flipped(x.edge)) ? -d : d;
}

double SpectralBasis::sup_norm(std::size_t i, unsigned order) const {
  double m = 0.0;
  if (path == SolverPath::Secular) {
    for (EdgeId e = 0; e < graph.edge_count(); ++e) m = std::max(m, modes.at(i)[e].sup(graph.edge(e).length, order));
    return m;
  }
  if (order >= 2) {
    throw Error(ErrorCode::FEMUnsupportedOrder, kModule, "P1 eigenfunctions have no pointwise derivatives of order >= 2");
  }
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto& v = std::get<SampledEdge>(phi(i).rep(e)).values;
    const double h = phi(i).spacing(e);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (order == 0) {
        m = std::max(m, std::abs(v[k]));
      } else if (k + 1 < v.size()) {
        m = std::max(m, std::abs(v[k + 1] - v[k]) / h);
      }
    }
  }
  return m;
}

double eig_residual(const SpectralBasis& basis, std::size_t i, std::size_t probes_per_edge,
                    std::optional<double> lambda_override) {
  if (i >= basis.size()) throw Error(ErrorCode::BadArgument, kModule, "eigenpair index out of range");
  if (probes_per_edge == 0) throw Error(ErrorCode::BadArgument, kModule, "need at least one probe per edge");
  const double lam = lambda_override.value_or(basis.lambda(i));
  const PiecewiseFunction& f = basis.phi(i);
  const CoefficientField& c = basis.coefficients;
  double r = 0.0;
  for (EdgeId e = 0; e < basis.graph.edge_count(); ++e) {
    const double l = basis.graph.edge(e).length;
    for (std::size_t k = 0; k < probes_per_edge; ++k) {
      const double t = l * (static_cast<double>(k) + 0.5) / static_cast<double>(probes_per_edge);
      const double u = f.derivative(e, t, 0);
      const double flux_div = c.a.value(e, t) * f.derivative(e, t, 2) + c.a.derivative(e, t, 1) * f.derivative(e, t, 1);
      r = std::max(r, std::abs(c.kappa2.value(e, t) * u - flux_div - lam * u));
    }
  }
  for (VertexId v = 0; v < basis.graph.vertex_count(); ++v) {
    r = std::max(r, vertex_flux_residual(basis, f, v));
    if (!basis.conditions.is_dirichlet(v)) r = std::max(r, vertex_jump(basis.graph, f, v, 0));
  }
  return r;
}

double kirchhoff_residual_max(const SpectralBasis& basis, std::size_t i) {
  double r = 0.0;
  for (VertexId v = 0; v < basis.graph.vertex_count(); ++v) {
    if (!basis.conditions.is_dirichlet(v)) r = std::max(r, vertex_flux_residual(basis, basis.phi(i), v));
  }
  return r;
}

WeylFit weyl_fit(const SpectralBasis& basis) {
  if (basis.size() < 10) throw Error(ErrorCode::BadArgument, kModule, "Weyl fit needs at least 10 eigenvalues");
  WeylFit w;
  w.A = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double r = basis.lambda(i) / (n * n);
    w.ratios.push_back(r);
    w.A = std::min(w.A, r);
    w.B = std::max(w.B, r);
  }
  return w;
}

Survey sup_norm_survey(const SpectralBasis& basis) { return derivative_bound_survey(basis, 0); }

Survey derivative_bound_survey(const SpectralBasis& basis, unsigned j) {
  if (basis.path == SolverPath::FEM && j >= 2) {
    throw Error(ErrorCode::FEMUnsupportedOrder, kModule, "derivative survey of order >= 2 needs the secular path");
  }
  Survey s;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double ratio = basis.sup_norm(i, j) / std::pow(basis.lambda(i), 0.5 * static_cast<double>(j));
    s.per_mode.push_back(ratio);
    s.constant = std::max(s.constant, ratio);
  }
  return s;
}

FemCrossCheck fem_cross_check(const MetricGraph& g, double kappa, const VertexConditionSet& conds, double h,
                              std::size_t n) {
  const SpectralBasis exact = secular_eigensolve(g, kappa, conds, n);
  const CoefficientField c = CoefficientField::constant(g, kappa);
  const SpectralBasis coarse = fem_eigensolve(g, c, conds, h, n);
  const SpectralBasis fine = fem_eigensolve(g, c, conds, h / 2.0, n);
  FemCrossCheck out;
  out.secular = exact.eigenvalues;
  out.fem_h = coarse.eigenvalues;
  out.fem_half = fine.eigenvalues;
  double order_sum = 0.0;
  std::size_t order_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ref = out.secular[i];
    const double ex = (4.0 * out.fem_half[i] - out.fem_h[i]) / 3.0;
    out.extrapolated.push_back(ex);
    out.max_rel_error_half = std::max(out.max_rel_error_half, std::abs(out.fem_half[i] - ref) / ref);
    out.max_rel_error_extrapolated = std::max(out.max_rel_error_extrapolated, std::abs(ex - ref) / ref);
    const double e1 = std::abs(out.fem_h[i] - ref), e2 = std::abs(out.fem_half[i] - ref);
    // Modes reproduced exactly (e.g. constants) carry no convergence information.
    if (e2 > 1e-11 * ref && e1 > e2) {
      const double p = std::log2(e1 / e2);
      out.observed_order.push_back(p);
      order_sum += p;
      ++order_count;
    } else {
      out.observed_order.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  out.mean_order = order_count ? order_sum / static_cast<double>(order_count) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace graphlaplace
