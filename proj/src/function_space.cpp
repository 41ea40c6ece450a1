#include "graphlaplace/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "graphlaplace/error.hpp"
#include "graphlaplace/numerics.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "function_space";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

double sampled_derivative(const std::vector<double>& v, double length, double t, unsigned order) {
  const std::size_t n = v.size();
  const double h = length / static_cast<double>(n - 1);
  t = std::clamp(t, 0.0, length);
  if (order == 0) {
    const double s = t / h;
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(s), n - 2);
    const double frac = s - static_cast<double>(k);
    return v[k] * (1.0 - frac) + v[k + 1] * frac;
  }
  const std::size_t width = order + 3;
  if (n < width) {
    fail(ErrorCode::InsufficientGrid, "derivative of order " + std::to_string(order) + " needs at least " +
                                          std::to_string(width) + " grid nodes, edge has " + std::to_string(n));
  }
  const double centre = t / h;
  long start = static_cast<long>(std::lround(centre)) - static_cast<long>(width / 2);
  start = std::clamp(start, 0L, static_cast<long>(n - width));
  std::vector<double> xs(width);
  for (std::size_t i = 0; i < width; ++i) xs[i] = static_cast<double>(start + static_cast<long>(i));
  const auto w = fd_weights(centre, xs, order);
  double acc = 0.0;
  for (std::size_t i = 0; i < width; ++i) acc += w[i] * v[static_cast<std::size_t>(start) + i];
  return acc / std::pow(h, static_cast<double>(order));
}

}  // namespace

PiecewiseFunction::PiecewiseFunction(std::vector<double> lengths, std::vector<EdgeRep> reps)
    : lengths_(std::move(lengths)), reps_(std::move(reps)) {
  if (lengths_.size() != reps_.size()) fail(ErrorCode::BadArgument, "one representation per edge required");
  for (const auto& r : reps_) {
    if (const auto* s = std::get_if<SampledEdge>(&r)) {
      if (s->values.size() < 2) fail(ErrorCode::BadGridSize, "sampled edge needs at least 2 values");
    } else if (!std::get<AnalyticEdge>(r).eval) {
      fail(ErrorCode::BadArgument, "analytic edge without evaluator");
    }
  }
}

namespace {
std::vector<double> edge_lengths(const MetricGraph& g) {
  std::vector<double> l(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) l[e] = g.edge(e).length;
  return l;
}
}  // namespace

PiecewiseFunction PiecewiseFunction::sampled(const MetricGraph& g, std::vector<std::vector<double>> values) {
  if (values.size() != g.edge_count()) fail(ErrorCode::BadArgument, "need sampled values for every edge");
  std::vector<EdgeRep> reps;
  reps.reserve(values.size());
  for (auto& v : values) reps.emplace_back(SampledEdge{std::move(v)});
  return PiecewiseFunction(edge_lengths(g), std::move(reps));
}

PiecewiseFunction PiecewiseFunction::analytic(const MetricGraph& g, std::vector<EdgeEvaluator> evals) {
  if (evals.size() != g.edge_count()) fail(ErrorCode::BadArgument, "need an evaluator for every edge");
  std::vector<EdgeRep> reps;
  reps.reserve(evals.size());
  for (auto& f : evals) reps.emplace_back(AnalyticEdge{std::move(f)});
  return PiecewiseFunction(edge_lengths(g), std::move(reps));
}

PiecewiseFunction PiecewiseFunction::sample(const MetricGraph& g, const std::function<double(EdgeId, double)>& fn,
                                            std::size_t nodes_per_edge) {
  std::vector<std::vector<double>> values(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (const GraphPoint& x : g.edge_grid(e, nodes_per_edge)) values[e].push_back(fn(e, x.t));
  }
  return sampled(g, std::move(values));
}

PiecewiseFunction PiecewiseFunction::constant(const MetricGraph& g, double c) {
  std::vector<EdgeEvaluator> evals(g.edge_count(), [c](double, unsigned order) { return order == 0 ? c : 0.0; });
  return analytic(g, std::move(evals));
}

PiecewiseFunction PiecewiseFunction::edge_indicator(const MetricGraph& g, EdgeId e) {
  if (e >= g.edge_count()) fail(ErrorCode::PointOutOfRange, "edge index out of range");
  std::vector<EdgeEvaluator> evals;
  for (EdgeId k = 0; k < g.edge_count(); ++k) {
    const double c = k == e ? 1.0 : 0.0;
    evals.emplace_back([c](double, unsigned order) { return order == 0 ? c : 0.0; });
  }
  return analytic(g, std::move(evals));
}

bool PiecewiseFunction::any_sampled() const {
  return std::any_of(reps_.begin(), reps_.end(), [](const EdgeRep& r) { return std::holds_alternative<SampledEdge>(r); });
}

double PiecewiseFunction::spacing(EdgeId e) const {
  if (const auto* s = std::get_if<SampledEdge>(&reps_.at(e))) {
    return lengths_[e] / static_cast<double>(s->values.size() - 1);
  }
  return 0.0;
}

double PiecewiseFunction::derivative(EdgeId e, double t, unsigned order) const {
  const EdgeRep& r = reps_.at(e);
  if (const auto* s = std::get_if<SampledEdge>(&r)) return sampled_derivative(s->values, lengths_[e], t, order);
  return std::get<AnalyticEdge>(r).eval(t, order);
}

PiecewiseFunction combine(double a, const PiecewiseFunction& f, double b, const PiecewiseFunction& h) {
  if (f.edge_count() != h.edge_count()) fail(ErrorCode::BadArgument, "combine: functions live on different graphs");
  std::vector<PiecewiseFunction::EdgeRep> reps;
  for (EdgeId e = 0; e < f.edge_count(); ++e) {
    const bool fs = f.is_sampled(e), hs = h.is_sampled(e);
    if (!fs && !hs) {
      auto fe = std::get<AnalyticEdge>(f.rep(e)).eval;
      auto he = std::get<AnalyticEdge>(h.rep(e)).eval;
      reps.emplace_back(AnalyticEdge{[a, b, fe, he](double t, unsigned k) { return a * fe(t, k) + b * he(t, k); }});
      continue;
    }
    std::size_t n = 0;
    if (fs) n = std::max(n, std::get<SampledEdge>(f.rep(e)).values.size());
    if (hs) n = std::max(n, std::get<SampledEdge>(h.rep(e)).values.size());
    const double l = f.length(e);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = k + 1 == n ? l : l * static_cast<double>(k) / static_cast<double>(n - 1);
      vals[k] = a * f.value(e, t) + b * h.value(e, t);
    }
    reps.emplace_back(SampledEdge{std::move(vals)});
  }
  std::vector<double> lengths(f.edge_count());
  for (EdgeId e = 0; e < f.edge_count(); ++e) lengths[e] = f.length(e);
  return PiecewiseFunction(std::move(lengths), std::move(reps));
}

void QuadratureConfig::validate() const {
  if (panels < 1 || gauss_nodes < 1) fail(ErrorCode::BadArgument, "quadrature needs at least one panel and node");
  if (!(band >= 0.0)) fail(ErrorCode::BadArgument, "band width must be non-negative");
  if (!(rel_tol > 0.0)) fail(ErrorCode::BadArgument, "rel_tol must be positive");
  if (!(refinement > 1.0)) fail(ErrorCode::BadArgument, "refinement factor must exceed 1");
}

double evaluate(const MetricGraph& g, const PiecewiseFunction& f, const GraphPoint& x) {
  g.check_point(x);
  return f.value(x.edge, x.t);
}

double edge_derivative(const MetricGraph& g, const PiecewiseFunction& f, const GraphPoint& x, unsigned order,
                       const Parameterization& eta) {
  g.check_point(x);
  const double d = f.derivative(x.edge, x.t, order);
  return (eta.flipped(x.edge) && order % 2 == 1) ? -d : d;
}

double directional_derivative_at_vertex(const MetricGraph& g, const PiecewiseFunction& f, VertexId v,
                                        const DirectionSlot& slot, unsigned order) {
  const auto slots = g.slots(v);
  if (std::find(slots.begin(), slots.end(), slot) == slots.end()) {
    fail(ErrorCode::BadArgument, "slot is not incident to vertex '" + g.vertex_name(v) + "'");
  }
  const double l = g.edge(slot.edge).length;
  if (slot.end == EdgeEnd::Start) return f.derivative(slot.edge, 0.0, order);
  const double d = f.derivative(slot.edge, l, order);
  return order % 2 == 1 ? -d : d;
}

double kirchhoff_residual(const MetricGraph& g, const PiecewiseFunction& f, VertexId v) {
  double sum = 0.0;
  for (const DirectionSlot& s : g.slots(v)) sum += directional_derivative_at_vertex(g, f, v, s, 1);
  return std::abs(sum);
}

double vertex_jump(const MetricGraph& g, const PiecewiseFunction& f, VertexId v, unsigned order) {
  if (order % 2 != 0) fail(ErrorCode::BadArgument, "vertex_jump is defined for even derivative orders only");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const DirectionSlot& s : g.slots(v)) {
    const double val = directional_derivative_at_vertex(g, f, v, s, order);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  return hi - lo;
}

namespace {

double integrate_on_edge(const PiecewiseFunction& layout, EdgeId e, const std::function<double(double)>& fn,
                         const QuadratureConfig& cfg) {
  const GaussRule& rule = gauss_legendre(cfg.gauss_nodes);
  const double l = layout.length(e);
  std::size_t panels = cfg.panels;
  if (layout.is_sampled(e)) panels = std::get<SampledEdge>(layout.rep(e)).values.size() - 1;
  const double w = l / static_cast<double>(panels);
  std::vector<double> terms;
  terms.reserve(panels * rule.nodes.size());
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = w * static_cast<double>(k);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = a + 0.5 * w * (rule.nodes[q] + 1.0);
      terms.push_back(0.5 * w * rule.weights[q] * fn(t));
    }
  }
  return pairwise_sum(terms);
}

}  // namespace

double integrate(const PiecewiseFunction& layout, const std::function<double(EdgeId, double)>& fn,
                 const QuadratureConfig& cfg) {
  cfg.validate();
  std::vector<double> per_edge(layout.edge_count());
  for (EdgeId e = 0; e < layout.edge_count(); ++e) {
    per_edge[e] = integrate_on_edge(layout, e, [&](double t) { return fn(e, t); }, cfg);
  }
  return pairwise_sum(per_edge);
}

double inner_product(const PiecewiseFunction& f, const PiecewiseFunction& h, const QuadratureConfig& cfg) {
  const PiecewiseFunction& layout = h.any_sampled() && !f.any_sampled() ? h : f;
  return integrate(layout, [&](EdgeId e, double t) { return f.value(e, t) * h.value(e, t); }, cfg);
}

double lp_norm(const PiecewiseFunction& f, double p, const QuadratureConfig& cfg, unsigned order) {
  if (!(p >= 1.0)) fail(ErrorCode::BadArgument, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (EdgeId e = 0; e < f.edge_count(); ++e) {
      const double l = f.length(e);
      const std::size_t n = f.is_sampled(e) ? std::get<SampledEdge>(f.rep(e)).values.size() : 1025;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = k + 1 == n ? l : l * static_cast<double>(k) / static_cast<double>(n - 1);
        m = std::max(m, std::abs(f.derivative(e, t, order)));
      }
    }
    return m;
  }
  const double s = integrate(f, [&](EdgeId e, double t) { return std::pow(std::abs(f.derivative(e, t, order)), p); }, cfg);
  return std::pow(s, 1.0 / p);
}

double default_jump_tolerance(const MetricGraph& g, const PiecewiseFunction& f, VertexId v) {
  double h = 0.0;
  for (const DirectionSlot& s : g.slots(v)) h = std::max(h, f.spacing(s.edge));
  return h > 0.0 ? 10.0 * h : 1e-7;
}

SobolevNorm sobolev_norm_W(const MetricGraph& g, const PiecewiseFunction& f, double alpha, double p,
                           const Parameterization& eta, const QuadratureConfig& cfg) {
  if (!(alpha >= 0.0)) fail(ErrorCode::BadArgument, "Sobolev order must be non-negative");
  const auto k = static_cast<unsigned>(std::floor(alpha));
  const double frac = alpha - static_cast<double>(k);
  SobolevNorm out;
  if (std::isinf(p)) {
    if (frac > 0.0) fail(ErrorCode::BadArgument, "W^{alpha,inf} is only supported for integer alpha");
    double m = 0.0;
    for (unsigned j = 0; j <= k; ++j) m = std::max(m, lp_norm(f, p, cfg, j));
    out.value = m;
    out.edge_part = m;
    return out;
  }
  std::vector<double> edge_terms(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    double acc = 0.0;
    for (unsigned j = 0; j <= k; ++j) {
      // Integrate over edge e only.
      acc += integrate_on_edge(f, e, [&](double t) { return std::pow(std::abs(f.derivative(e, t, j)), p); }, cfg);
    }
    if (frac > 0.0) {
      const SeminormResult r = edge_slobodeckij_seminorm(f, e, frac, p, cfg, k);
      out.converged = out.converged && r.converged;
      acc += std::pow(r.value, p);
    }
    edge_terms[e] = acc;
  }
  out.edge_part = pairwise_sum(edge_terms);
  if (frac > 0.0) {
    const SeminormResult r = slobodeckij_seminorm(g, f, frac, p, cfg, 2 * (k / 2), eta);
    out.converged = out.converged && r.converged;
    out.global_part = std::pow(r.value, p);
  }
  out.value = std::pow(out.edge_part + out.global_part, 1.0 / p);
  return out;
}

MembershipReport membership_report_W(const MetricGraph& g, const PiecewiseFunction& f, double alpha, double p,
                                     const QuadratureConfig& cfg, std::optional<double> jump_tolerance) {
  if (!(alpha > 0.0)) fail(ErrorCode::BadArgument, "membership order must be positive");
  if (!(p >= 1.0)) fail(ErrorCode::BadArgument, "membership requires p >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  if (!std::isinf(p)) {
    const double k = (alpha - inv_p) / 2.0;
    if (k > -1e-12 && std::abs(k - std::round(k)) < 1e-12) {
      std::ostringstream os;
      os << "alpha = " << alpha << " is a critical exponent 2k + 1/p for p = " << p;
      fail(ErrorCode::CriticalExponent, os.str());
    }
  }
  MembershipReport rep;
  rep.alpha = alpha;
  rep.p = p;
  rep.continuity_order = 2 * static_cast<int>(std::floor(alpha / 2.0 - inv_p / 2.0));

  const auto k = static_cast<unsigned>(std::floor(alpha));
  const double frac = alpha - static_cast<double>(k);
  bool ok = true;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    double acc = 0.0;
    bool finite = true;
    for (unsigned j = 0; j <= k; ++j) {
      double s;
      if (std::isinf(p)) {
        s = 0.0;
        const double l = g.edge(e).length;
        for (int q = 0; q <= 1024; ++q) s = std::max(s, std::abs(f.derivative(e, l * q / 1024.0, j)));
        acc = std::max(acc, s);
      } else {
        s = integrate_on_edge(f, e, [&](double t) { return std::pow(std::abs(f.derivative(e, t, j)), p); }, cfg);
        acc += s;
      }
      finite = finite && std::isfinite(s);
    }
    if (frac > 0.0 && !std::isinf(p)) {
      const SeminormResult r = edge_slobodeckij_seminorm(f, e, frac, p, cfg, k);
      finite = finite && r.converged;
      acc += std::pow(r.value, p);
    }
    rep.edge_norms.push_back(std::isinf(p) ? acc : std::pow(acc, 1.0 / p));
    rep.edge_finite.push_back(finite);
    ok = ok && finite;
  }
  for (int order = 0; order <= rep.continuity_order; order += 2) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      VertexJumpEntry j;
      j.vertex = v;
      j.order = static_cast<unsigned>(order);
      j.jump = vertex_jump(g, f, v, j.order);
      j.tolerance = jump_tolerance.value_or(default_jump_tolerance(g, f, v));
      ok = ok && j.jump <= j.tolerance;
      rep.jumps.push_back(j);
    }
  }
  if (frac > 0.0) {
    if (std::isinf(p)) fail(ErrorCode::BadArgument, "fractional order with p = inf is not supported");
    rep.global_seminorm = slobodeckij_seminorm(g, f, frac, p, cfg, 2 * (k / 2));
    ok = ok && rep.global_seminorm->converged;
  }
  rep.consistent = ok;
  return rep;
}

std::string MembershipReport::to_text(const MetricGraph& g) const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha = " << alpha << "\np = " << p << "\ncontinuity_order = " << continuity_order << "\n";
  for (std::size_t e = 0; e < edge_norms.size(); ++e) {
    os << "edge." << g.edge(e).name << ".norm = " << edge_norms[e] << "\n";
    os << "edge." << g.edge(e).name << ".finite = " << (edge_finite[e] ? "true" : "false") << "\n";
  }
  for (const auto& j : jumps) {
    os << "jump." << g.vertex_name(j.vertex) << ".order" << j.order << " = " << j.jump << " (tol " << j.tolerance
       << ")\n";
  }
  if (global_seminorm) {
    os << "global_seminorm = " << global_seminorm->value << "\n";
    os << "global_seminorm.converged = " << (global_seminorm->converged ? "true" : "false") << "\n";
    os << "global_seminorm.growth_exponent = " << global_seminorm->growth_exponent << "\n";
  }
  os << "verdict = " << (consistent ? "consistent with membership" : "not consistent") << "\n";
  return os.str();
}

}  // namespace graphlaplace
