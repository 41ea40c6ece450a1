#include "graphlaplace/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "graphlaplace/error.hpp"
#include "graphlaplace/numerics.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "fractional";
constexpr double kInf = std::numeric_limits<double>::infinity();

const SpectralBasis& basis_of(const SpectralCoefficients& c) {
  if (!c.basis) throw Error(ErrorCode::BadArgument, kModule, "coefficients carry no basis");
  if (c.c.size() > c.basis->size()) throw Error(ErrorCode::BadArgument, kModule, "more coefficients than eigenpairs");
  return *c.basis;
}

/// Power-law fit of |v_i| over i in [N/2, N] (1-based) using 8 blocks:
/// block means (what a sum sees) or block maxima (for bounds). Degenerate
/// clusters make consecutive entries differ wildly, so per-entry fits are
/// unreliable. Entries whose coefficient is at the rounding floor of the
/// largest one (projection noise, amplified by lambda^beta in weighted
/// terms) are dropped. Returns nullopt when fewer than 4 blocks remain,
/// which callers treat as a finite expansion.
std::optional<LineFit> tail_power_fit(std::vector<double> v, bool use_max, const std::vector<double>& coeffs) {
  const std::size_t n = v.size();
  if (n < 16) return std::nullopt;
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(coeffs[i]) <= 1e-13 * cmax) v[i] = 0.0;
  }
  constexpr std::size_t kBlocks = 8;
  const std::size_t lo = n / 2;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < kBlocks; ++k) {
    const std::size_t a = lo + (n - lo) * k / kBlocks, b = lo + (n - lo) * (k + 1) / kBlocks;
    double agg = 0.0, centre = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      agg = use_max ? std::max(agg, std::abs(v[i])) : agg + std::abs(v[i]);
      centre += std::log(static_cast<double>(i + 1));
    }
    if (!use_max) agg /= static_cast<double>(b - a);
    // Round-off sized blocks carry no decay information.
    if (agg > 0.0) {
      x.push_back(centre / static_cast<double>(b - a));
      y.push_back(std::log(agg));
    }
  }
  double big = 0.0;
  for (double t : v) big = std::max(big, std::abs(t));
  for (std::size_t k = 0; k < y.size();) {
    if (y[k] < std::log(big) - 30.0 * std::log(10.0)) {
      x.erase(x.begin() + static_cast<std::ptrdiff_t>(k));
      y.erase(y.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  if (x.size() < 4) return std::nullopt;
  return fit_line(x, y);
}

SpectralCoefficients with_values(const SpectralCoefficients& like, std::vector<double> c) {
  return SpectralCoefficients{like.basis, std::move(c)};
}

}  // namespace

SpectralCoefficients SpectralCoefficients::unit(std::shared_ptr<const SpectralBasis> basis, std::size_t i) {
  SpectralCoefficients c = zero(std::move(basis));
  c.c.at(i) = 1.0;
  return c;
}

SpectralCoefficients SpectralCoefficients::zero(std::shared_ptr<const SpectralBasis> basis) {
  if (!basis) throw Error(ErrorCode::BadArgument, kModule, "null basis");
  const std::size_t n = basis->size();
  return SpectralCoefficients{std::move(basis), std::vector<double>(n, 0.0)};
}

SpectralCoefficients project(const PiecewiseFunction& f, std::shared_ptr<const SpectralBasis> basis,
                             const QuadratureConfig& cfg) {
  if (!basis) throw Error(ErrorCode::BadArgument, kModule, "null basis");
  const SpectralBasis& b = *basis;
  const MetricGraph& g = b.graph;
  if (f.edge_count() != g.edge_count()) throw Error(ErrorCode::BadArgument, kModule, "function/graph mismatch");
  const GaussRule& rule = gauss_legendre(cfg.gauss_nodes);
  const double omega_max = b.size() ? std::sqrt(std::max(0.0, b.eigenvalues.back() - b.coefficients.kappa2_min)) : 0.0;

  // Quadrature nodes per edge, aligned to any sampled grid.
  std::vector<std::vector<double>> nodes(g.edge_count()), weights(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double l = g.edge(e).length;
    std::size_t panels = std::max<std::size_t>(cfg.panels,
                                               static_cast<std::size_t>(std::ceil(2.0 * omega_max * l / std::numbers::pi)) + 2);
    std::size_t align = 0;
    if (f.is_sampled(e)) align = std::get<SampledEdge>(f.rep(e)).values.size() - 1;
    if (b.path == SolverPath::FEM) align = std::max(align, std::get<SampledEdge>(b.phi(0).rep(e)).values.size() - 1);
    if (align > 0) panels = ((panels + align - 1) / align) * align;
    const double w = l / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        nodes[e].push_back(w * static_cast<double>(k) + 0.5 * w * (rule.nodes[q] + 1.0));
        weights[e].push_back(0.5 * w * rule.weights[q]);
      }
    }
  }
  std::vector<std::vector<double>> fw(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (std::size_t k = 0; k < nodes[e].size(); ++k) fw[e].push_back(weights[e][k] * f.value(e, nodes[e][k]));
  }
  SpectralCoefficients out = SpectralCoefficients::zero(basis);
  parallel_for(b.size(), [&](std::size_t i) {
    std::vector<double> parts(g.edge_count());
    std::vector<double> terms;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      terms.resize(nodes[e].size());
      for (std::size_t k = 0; k < nodes[e].size(); ++k) terms[k] = fw[e][k] * b.phi(i).value(e, nodes[e][k]);
      parts[e] = pairwise_sum(terms);
    }
    out.c[i] = pairwise_sum(parts);
  });
  for (double v : out.c) {
    if (!std::isfinite(v)) throw Error(ErrorCode::QuadratureFailure, kModule, "non-finite projection coefficient");
  }
  return out;
}

NormEstimate dot_h_norm(const SpectralCoefficients& c, double beta) {
  const SpectralBasis& b = basis_of(c);
  std::vector<double> terms(c.c.size());
  for (std::size_t i = 0; i < c.c.size(); ++i) terms[i] = std::pow(b.lambda(i), beta) * c.c[i] * c.c[i];
  NormEstimate n;
  n.truncation = c.c.size();
  n.value = std::sqrt(pairwise_sum(terms));
  if (const auto fit = tail_power_fit(terms, false, c.c)) {
    const double s = -fit->slope;
    if (s <= 1.0) {
      n.tail_divergent = true;
      n.tail_sq = kInf;
    } else {
      const double N = static_cast<double>(terms.size());
      n.tail_sq = std::exp(fit->intercept + fit->slope * std::log(N)) * N / (s - 1.0);
    }
  }
  return n;
}

SpectralCoefficients apply_fractional(const SpectralCoefficients& c, double alpha) {
  const SpectralBasis& b = basis_of(c);
  std::vector<double> out(c.c.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(b.lambda(i), alpha / 2.0) * c.c[i];
  return with_values(c, std::move(out));
}

SpectralCoefficients solve_fractional(const SpectralCoefficients& f, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::BadArgument, kModule, "solve_fractional needs alpha > 0");
  return apply_fractional(f, -alpha);
}

DerivativeEstimate spectral_derivative(const SpectralCoefficients& c, unsigned j, const GraphPoint& x,
                                       const Parameterization& eta) {
  const SpectralBasis& b = basis_of(c);
  if (b.path == SolverPath::FEM && j >= 2) {
    throw Error(ErrorCode::FEMUnsupportedOrder, kModule, "spectral derivatives of order >= 2 need the secular path");
  }
  DerivativeEstimate d;
  const auto fit = tail_power_fit(c.c, true, c.c);
  d.decay_exponent = fit ? -fit->slope : kInf;
  if (!(d.decay_exponent > static_cast<double>(j) + 1.0)) {
    std::ostringstream os;
    os << "coefficients decay like i^-" << d.decay_exponent << "; order-" << j << " series needs an exponent above "
       << j + 1;
    throw Error(ErrorCode::InsufficientDecay, kModule, os.str());
  }
  std::vector<double> terms(c.c.size());
  for (std::size_t i = 0; i < c.c.size(); ++i) terms[i] = c.c[i] == 0.0 ? 0.0 : c.c[i] * b.derivative(i, x, j, eta);
  d.value = pairwise_sum(terms);
  if (fit) {
    const double N = static_cast<double>(c.c.size());
    const double K = std::exp(fit->intercept);
    const double Cj = derivative_bound_survey(b, j).constant;
    const double B = b.size() >= 10 ? weyl_fit(b).B : b.eigenvalues.back() / (N * N);
    const double r = d.decay_exponent;
    d.tail_bound = K * Cj * std::pow(B, j / 2.0) * std::pow(N, static_cast<double>(j) - r + 1.0) / (r - j - 1.0);
  }
  return d;
}

PiecewiseFunction synthesize(const SpectralCoefficients& c) {
  const SpectralBasis& b = basis_of(c);
  const MetricGraph& g = b.graph;
  if (b.path == SolverPath::FEM) {
    std::vector<std::vector<double>> vals(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      vals[e].assign(std::get<SampledEdge>(b.phi(0).rep(e)).values.size(), 0.0);
      for (std::size_t i = 0; i < c.c.size(); ++i) {
        if (c.c[i] == 0.0) continue;
        const auto& pv = std::get<SampledEdge>(b.phi(i).rep(e)).values;
        for (std::size_t k = 0; k < pv.size(); ++k) vals[e][k] += c.c[i] * pv[k];
      }
    }
    return PiecewiseFunction::sampled(g, std::move(vals));
  }
  std::vector<EdgeEvaluator> evals;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    std::vector<Sinusoid> modes;
    std::vector<double> coef;
    for (std::size_t i = 0; i < c.c.size(); ++i) {
      if (c.c[i] == 0.0) continue;
      modes.push_back(b.modes[i][e]);
      coef.push_back(c.c[i]);
    }
    evals.emplace_back([modes = std::move(modes), coef = std::move(coef)](double t, unsigned order) {
      double s = 0.0;
      for (std::size_t k = 0; k < modes.size(); ++k) s += coef[k] * modes[k].derivative(t, order);
      return s;
    });
  }
  return PiecewiseFunction::analytic(g, std::move(evals));
}

std::string to_string(SeriesBehaviour b) {
  switch (b) {
    case SeriesBehaviour::Bounded: return "bounded";
    case SeriesBehaviour::Divergent: return "divergent";
    default: return "indeterminate";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NotMember: return "not-member";
    default: return "indeterminate";
  }
}

namespace {

// Vertex checks on one function. `scale0`/`scale1` bound |u| and |u'| so the
// tolerance is relative to the function's own size.
void check_vertices(const SpectralBasis& b, const PiecewiseFunction& u, const std::string& subject, unsigned image,
                    bool continuity, bool flux, double tol0, double tol1, std::vector<VertexDiagnostic>& out) {
  const MetricGraph& g = b.graph;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const VertexCondition& cond = b.conditions.at(v);
    if (continuity) {
      if (cond.kind == VertexConditionKind::Dirichlet) {
        double m = 0.0;
        for (const auto& s : g.slots(v)) m = std::max(m, std::abs(directional_derivative_at_vertex(g, u, v, s, 0)));
        out.push_back({"dirichlet", subject, image, v, m, tol0, m <= tol0});
      } else {
        const double j = vertex_jump(g, u, v, 0);
        out.push_back({"continuity", subject, image, v, j, tol0, j <= tol0});
      }
    }
    if (flux && cond.kind != VertexConditionKind::Dirichlet) {
      double sum = 0.0;
      for (const auto& s : g.slots(v)) {
        const double t = s.end == EdgeEnd::Start ? 0.0 : g.edge(s.edge).length;
        sum += b.coefficients.a.value(s.edge, t) * directional_derivative_at_vertex(g, u, v, s, 1);
      }
      if (cond.kind == VertexConditionKind::Robin) sum -= cond.weight * directional_derivative_at_vertex(g, u, v, g.slots(v)[0], 0);
      out.push_back({"kirchhoff", subject, image, v, std::abs(sum), tol1, std::abs(sum) <= tol1});
    }
  }
}

}  // namespace

RegularityReport regularity_report(const SpectralCoefficients& c, double alpha_target,
                                   const std::optional<PiecewiseFunction>& source) {
  const SpectralBasis& b = basis_of(c);
  if (!std::isfinite(alpha_target) || alpha_target < 0.0) {
    throw Error(ErrorCode::BadArgument, kModule, "regularity target must be a finite alpha >= 0");
  }
  const double k = alpha_target - 0.5;
  if (k >= 0.0 && std::abs(k - std::round(k)) < 1e-12) {
    throw Error(ErrorCode::ExceptionalOrder, kModule,
                "alpha = " + std::to_string(alpha_target) + " is a half-integer; no characterization applies");
  }
  RegularityReport r;
  r.alpha_target = alpha_target;
  std::vector<double> terms(c.c.size());
  double run = 0.0;
  for (std::size_t i = 0; i < c.c.size(); ++i) {
    terms[i] = std::pow(b.lambda(i), alpha_target) * c.c[i] * c.c[i];
    run += terms[i];
    r.partial_sums.push_back(run);
  }
  if (const auto fit = tail_power_fit(terms, false, c.c)) {
    r.term_decay = -fit->slope;
    if (r.term_decay > 1.1) {
      r.series = SeriesBehaviour::Bounded;
    } else if (r.term_decay < 0.9) {
      r.series = SeriesBehaviour::Divergent;
    } else {
      r.series = SeriesBehaviour::Indeterminate;
    }
  } else {
    r.term_decay = kInf;
    r.series = SeriesBehaviour::Bounded;
  }
  r.kirchhoff_images = static_cast<unsigned>(std::floor(alpha_target / 2.0 + 0.25));
  r.dirichlet_images = static_cast<unsigned>(std::floor(alpha_target / 2.0 + 0.75));

  const double csup = sup_norm_survey(b).constant;
  const double cder = b.path == SolverPath::Secular ? derivative_bound_survey(b, 1).constant : 0.0;
  for (unsigned m = 0; m < r.dirichlet_images; ++m) {
    const SpectralCoefficients cm = apply_fractional(c, 2.0 * m);
    double bound0 = 0.0, bound1 = 0.0;
    for (std::size_t i = 0; i < cm.c.size(); ++i) {
      bound0 += std::abs(cm.c[i]) * csup;
      bound1 += std::abs(cm.c[i]) * cder * std::sqrt(b.lambda(i));
    }
    const bool flux = m < r.kirchhoff_images;
    double tol1 = 1e-7 * std::max(1.0, bound1);
    // P1 fluxes are only first-order accurate.
    if (b.path == SolverPath::FEM) tol1 = 10.0 * b.mesh_size * std::max(1.0, bound0) / b.graph.min_edge_length();
    check_vertices(b, synthesize(cm), "expansion", m, true, flux, 1e-7 * std::max(1.0, bound0), tol1, r.vertex);
  }
  if (source) {
    const MetricGraph& g = b.graph;
    if (r.dirichlet_images >= 1) {
      double tol = 0.0;
      for (VertexId v = 0; v < g.vertex_count(); ++v) tol = std::max(tol, default_jump_tolerance(g, *source, v));
      check_vertices(b, *source, "source", 0, true, r.kirchhoff_images >= 1, tol, tol, r.vertex);
    }
    // Even-derivative continuity required by the H^alpha part.
    const auto top = static_cast<int>(std::floor(alpha_target / 2.0 - 0.25));
    for (int j = 1; j <= top; ++j) {
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        double scale = 1.0;
        for (const auto& s : g.slots(v)) {
          scale = std::max(scale, std::abs(directional_derivative_at_vertex(g, *source, v, s, 2 * j)));
        }
        const double tol = default_jump_tolerance(g, *source, v) * scale;
        const double jump = vertex_jump(g, *source, v, 2 * j);
        r.vertex.push_back({"continuity-D" + std::to_string(2 * j), "source", 0, v, jump, tol, jump <= tol});
      }
    }
  }
  r.diagnostics_pass = std::all_of(r.vertex.begin(), r.vertex.end(), [](const auto& d) { return d.pass; });
  if (!r.diagnostics_pass) {
    r.verdict = Verdict::NotMember;
  } else if (r.series == SeriesBehaviour::Bounded) {
    r.verdict = Verdict::Member;
  } else if (r.series == SeriesBehaviour::Divergent) {
    r.verdict = Verdict::NotMember;
  } else {
    r.verdict = Verdict::Indeterminate;
  }
  return r;
}

std::string RegularityReport::to_text(const MetricGraph& g) const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha_target = " << alpha_target << "\n";
  os << "truncation = " << partial_sums.size() << "\n";
  os << "partial_sum_final = " << (partial_sums.empty() ? 0.0 : partial_sums.back()) << "\n";
  os << "term_decay_exponent = " << term_decay << "\n";
  os << "series = " << to_string(series) << "\n";
  os << "kirchhoff_images = " << kirchhoff_images << "\n";
  os << "dirichlet_images = " << dirichlet_images << "\n";
  for (const auto& d : vertex) {
    os << "vertex[" << g.vertex_name(d.vertex) << "]." << d.subject << ".L^" << d.image << "." << d.check << " = "
       << d.value << " (tol " << d.tolerance << ") " << (d.pass ? "pass" : "FAIL") << "\n";
  }
  os << "diagnostics = " << (diagnostics_pass ? "pass" : "fail") << "\n";
  os << "verdict = " << to_string(verdict) << "\n";
  return os.str();
}

}  // namespace graphlaplace
