// Singular double integrals for the Slobodeckij seminorm.
//
// Same-edge pairs are integrated in (t, r = s - t) coordinates, where the
// geodesic distance depends on r only; pairs with d < band are excluded and
// r-panels are graded geometrically toward the excluded band. Pairs on
// different edges use tensor Gauss panels graded toward the edge ends; at a
// shared vertex the corner panel pair [0, band]^2 is excluded. The band is
// then refined and the sequence extrapolated (Aitken) or flagged divergent.

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphlaplace/error.hpp"
#include "graphlaplace/function_space.hpp"
#include "graphlaplace/numerics.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "function_space";

std::vector<double> graded_breaks(double a, double b, double h0, std::size_t q, bool grade_left, bool grade_right) {
  std::vector<double> br;
  const double H = (b - a) / static_cast<double>(q);
  br.push_back(a);
  br.push_back(b);
  for (std::size_t j = 1; j < q; ++j) br.push_back(a + H * static_cast<double>(j));
  if (h0 > 0.0) {
    for (double o = h0; o < H; o *= 2.0) {
      if (grade_left) br.push_back(a + o);
      if (grade_right) br.push_back(b - o);
    }
  }
  std::sort(br.begin(), br.end());
  std::vector<double> out;
  for (double x : br) {
    if (x < a || x > b) continue;
    if (out.empty() || x - out.back() > 1e-14 * std::max(1.0, std::abs(b - a))) out.push_back(x);
  }
  if (out.back() != b) out.back() = b;
  return out;
}

struct EdgeNodes {
  std::vector<double> t, w, value, to_start, to_end;
  std::vector<std::size_t> panel;
  std::size_t panel_count = 0;
};

EdgeNodes build_nodes(const PiecewiseFunction& f, EdgeId e, double length, double band, std::size_t q,
                      const GaussRule& rule, unsigned order, double sign) {
  EdgeNodes n;
  const auto br = graded_breaks(0.0, length, band, q, true, true);
  n.panel_count = br.size() - 1;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double a = br[k], w = br[k + 1] - br[k];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = a + 0.5 * w * (rule.nodes[i] + 1.0);
      n.t.push_back(t);
      n.w.push_back(0.5 * w * rule.weights[i]);
      n.value.push_back(sign * f.derivative(e, t, order));
      n.to_start.push_back(t);
      n.to_end.push_back(length - t);
      n.panel.push_back(k);
    }
  }
  return n;
}

// 2 * int_{r} int_0^{l-r} |F(t+r) - F(t)|^p dt / d(r)^(1+gamma p) dr
double same_edge_integral(const PiecewiseFunction& f, EdgeId e, double length, double alt_route, double band,
                          double gamma, double p, const QuadratureConfig& cfg, unsigned order) {
  const GaussRule& rule = gauss_legendre(cfg.gauss_nodes);
  const double r_hi = std::min(length, length + alt_route - band);
  if (r_hi <= band) return 0.0;
  const auto rbr = graded_breaks(band, r_hi, band, cfg.panels, true, true);
  const double expo = 1.0 + gamma * p;
  std::vector<double> outer;
  std::vector<double> inner;
  for (std::size_t k = 0; k + 1 < rbr.size(); ++k) {
    const double ra = rbr[k], rw = rbr[k + 1] - rbr[k];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = ra + 0.5 * rw * (rule.nodes[i] + 1.0);
      const double d = std::min(r, length - r + alt_route);
      const double span = length - r;
      const double tw = span / static_cast<double>(cfg.panels);
      inner.clear();
      for (std::size_t m = 0; m < cfg.panels; ++m) {
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          const double t = tw * static_cast<double>(m) + 0.5 * tw * (rule.nodes[j] + 1.0);
          const double diff = f.derivative(e, t + r, order) - f.derivative(e, t, order);
          inner.push_back(0.5 * tw * rule.weights[j] * std::pow(std::abs(diff), p));
        }
      }
      outer.push_back(0.5 * rw * rule.weights[i] * pairwise_sum(inner) / std::pow(d, expo));
    }
  }
  return 2.0 * pairwise_sum(outer);
}

double cross_edge_integral(const MetricGraph& g, EdgeId e1, EdgeId e2, const EdgeNodes& n1, const EdgeNodes& n2,
                           double gamma, double p) {
  const Eigen::MatrixXd& D = g.vertex_distances();
  const VertexId a0 = g.edge(e1).tail, a1 = g.edge(e1).head;
  const VertexId b0 = g.edge(e2).tail, b1 = g.edge(e2).head;
  const double expo = 1.0 + gamma * p;
  const std::size_t last1 = n1.panel_count - 1, last2 = n2.panel_count - 1;
  auto excluded = [&](std::size_t p1, std::size_t p2) {
    const bool s1 = p1 == 0, e1end = p1 == last1, s2 = p2 == 0, e2end = p2 == last2;
    return (s1 && s2 && a0 == b0) || (s1 && e2end && a0 == b1) || (e1end && s2 && a1 == b0) ||
           (e1end && e2end && a1 == b1);
  };
  std::vector<double> rows(n1.t.size());
  std::vector<double> cols(n2.t.size());
  for (std::size_t i = 0; i < n1.t.size(); ++i) {
    for (std::size_t j = 0; j < n2.t.size(); ++j) {
      if (excluded(n1.panel[i], n2.panel[j])) {
        cols[j] = 0.0;
        continue;
      }
      const double d = std::min({n1.to_start[i] + D(a0, b0) + n2.to_start[j], n1.to_start[i] + D(a0, b1) + n2.to_end[j],
                                 n1.to_end[i] + D(a1, b0) + n2.to_start[j], n1.to_end[i] + D(a1, b1) + n2.to_end[j]});
      const double diff = n1.value[i] - n2.value[j];
      cols[j] = n2.w[j] * std::pow(std::abs(diff), p) / std::pow(d, expo);
    }
    rows[i] = n1.w[i] * pairwise_sum(cols);
  }
  return pairwise_sum(rows);
}

void check_args(double gamma, double p, const QuadratureConfig& cfg) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::BadGamma, kModule, "Slobodeckij order gamma must lie in (0, 1)");
  }
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorCode::BadArgument, kModule, "seminorm needs finite p >= 1");
  cfg.validate();
  if (!(cfg.band > 0.0)) throw Error(ErrorCode::BadArgument, kModule, "seminorm needs a positive initial band");
  if (cfg.levels < 1) throw Error(ErrorCode::BadArgument, kModule, "at least one refinement level required");
}

SeminormResult finish(std::vector<double> bands, std::vector<double> raw, double p, const QuadratureConfig& cfg) {
  SeminormResult res;
  res.bands = std::move(bands);
  res.raw = std::move(raw);
  const auto& I = res.raw;
  const std::size_t K = I.size() - 1;
  double scale = 0.0;
  for (double v : I) scale = std::max(scale, std::abs(v));
  if (scale <= std::numeric_limits<double>::min()) {
    res.value = 0.0;
    res.converged = true;
    res.growth_exponent = -std::numeric_limits<double>::infinity();
    return res;
  }
  if (K < 2) {
    res.value = std::pow(std::max(I[K], 0.0), 1.0 / p);
    res.converged = K == 1 && std::abs(I[1] - I[0]) <= cfg.rel_tol * std::abs(I[1]);
    return res;
  }
  const double logR = std::log(cfg.refinement);
  auto aitken = [&](std::size_t k) {
    const double dk = I[k] - I[k - 1], dk1 = I[k - 1] - I[k - 2];
    if (dk1 == 0.0) return I[k];
    const double rho = dk / dk1;
    if (!(rho >= 0.0 && rho < 0.999)) return I[k];
    return I[k] + dk * rho / (1.0 - rho);
  };
  const double dK = I[K] - I[K - 1], dK1 = I[K - 1] - I[K - 2];
  const double flat = 1e-3 * cfg.rel_tol * std::abs(I[K]);
  if (std::abs(dK) <= flat) {
    res.value = std::pow(std::max(I[K], 0.0), 1.0 / p);
    res.converged = true;
    res.growth_exponent = -std::numeric_limits<double>::infinity();
    return res;
  }
  const double rho = dK1 != 0.0 ? dK / dK1 : std::numeric_limits<double>::infinity();
  res.growth_exponent = std::log(std::abs(rho)) / logR;
  const double eK = aitken(K), eK1 = aitken(K - 1);
  const bool shrinking = rho > 0.0 && rho < 1.0;
  res.converged = shrinking && std::abs(eK - eK1) <= cfg.rel_tol * std::abs(eK);
  res.value = std::pow(std::max(res.converged ? eK : I[K], 0.0), 1.0 / p);
  return res;
}

}  // namespace

SeminormResult slobodeckij_seminorm(const MetricGraph& g, const PiecewiseFunction& f, double gamma, double p,
                                    const QuadratureConfig& cfg, unsigned derivative_order, const Parameterization& eta) {
  check_args(gamma, p, cfg);
  if (f.edge_count() != g.edge_count()) throw Error(ErrorCode::BadArgument, kModule, "function/graph mismatch");
  const GaussRule& rule = gauss_legendre(cfg.gauss_nodes);
  const std::size_t ne = g.edge_count();
  std::vector<std::pair<EdgeId, EdgeId>> pairs;
  for (EdgeId a = 0; a < ne; ++a) {
    for (EdgeId b = a; b < ne; ++b) pairs.emplace_back(a, b);
  }
  std::vector<double> bands, raw;
  double band = cfg.band;
  for (std::size_t level = 0; level < cfg.levels; ++level, band /= cfg.refinement) {
    std::vector<EdgeNodes> nodes(ne);
    parallel_for(ne, [&](std::size_t e) {
      const double sign = (derivative_order % 2 == 1 && eta.flipped(e)) ? -1.0 : 1.0;
      nodes[e] = build_nodes(f, e, g.edge(e).length, band, cfg.panels, rule, derivative_order, sign);
    });
    std::vector<double> contrib(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
      const auto [a, b] = pairs[k];
      if (a == b) {
        const Edge& ed = g.edge(a);
        const double alt = g.vertex_distances()(ed.tail, ed.head);
        contrib[k] = same_edge_integral(f, a, ed.length, alt, band, gamma, p, cfg, derivative_order);
      } else {
        contrib[k] = 2.0 * cross_edge_integral(g, a, b, nodes[a], nodes[b], gamma, p);
      }
    });
    bands.push_back(band);
    raw.push_back(pairwise_sum(contrib));
  }
  return finish(std::move(bands), std::move(raw), p, cfg);
}

SeminormResult edge_slobodeckij_seminorm(const PiecewiseFunction& f, EdgeId e, double gamma, double p,
                                         const QuadratureConfig& cfg, unsigned derivative_order) {
  check_args(gamma, p, cfg);
  const double l = f.length(e);
  std::vector<double> bands, raw;
  double band = cfg.band;
  for (std::size_t level = 0; level < cfg.levels; ++level, band /= cfg.refinement) {
    bands.push_back(band);
    // Interval kernel |t - s|: no alternative route.
    raw.push_back(same_edge_integral(f, e, l, std::numeric_limits<double>::infinity(), band, gamma, p, cfg,
                                     derivative_order));
  }
  return finish(std::move(bands), std::move(raw), p, cfg);
}

}  // namespace graphlaplace
