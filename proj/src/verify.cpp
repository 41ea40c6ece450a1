#include "graphlaplace/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>

#include "graphlaplace/error.hpp"
#include "graphlaplace/fractional.hpp"
#include "graphlaplace/sampler.hpp"
#include "graphlaplace/spectral.hpp"

namespace graphlaplace {

namespace {

GraphPoint random_point(const MetricGraph& g, const RngSpec& rng, std::uint64_t index) {
  const auto e = std::min<EdgeId>(static_cast<EdgeId>(rng.uniform(2 * index) * static_cast<double>(g.edge_count())),
                                  g.edge_count() - 1);
  return {e, rng.uniform(2 * index + 1) * g.edge(e).length};
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Largest entry of |head| and |tail| halves of a per-mode survey.
std::pair<double, double> head_tail(const std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) (i < mid ? head : tail) = std::max(i < mid ? head : tail, v[i]);
  return {head, tail};
}

class Suite {
 public:
  std::vector<CheckResult> rows;

  // Runs `body`, which fills value/threshold/pass; module errors become failed rows.
  void run(const std::string& module, const std::string& name, const std::function<void(CheckResult&)>& body) {
    CheckResult r{module, name, 0.0, 0.0, false, ""};
    try {
      body(r);
    } catch (const Error& e) {
      r.pass = false;
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.note = std::string(to_string(e.code())) + ": " + e.what();
    }
    rows.push_back(std::move(r));
  }
};

void le(CheckResult& r, double value, double threshold) {
  r.value = value;
  r.threshold = threshold;
  r.pass = std::isfinite(value) && value <= threshold;
}

}  // namespace

std::vector<CheckResult> verify_suite(const MetricGraph& g, const VertexConditionSet& conds, const VerifyOptions& opt) {
  Suite s;
  const RngSpec rng{opt.seed, 0};
  const double L = g.total_length();

  // metric_graph
  s.run("metric_graph", "metric_axioms", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t k = 0; k < opt.triples; ++k) {
      const GraphPoint x = random_point(g, rng, 3 * k), y = random_point(g, rng, 3 * k + 1),
                       z = random_point(g, rng, 3 * k + 2);
      const double dxy = g.distance(x, y), dyx = g.distance(y, x), dxz = g.distance(x, z), dzy = g.distance(z, y);
      worst = std::max({worst, -dxy, std::abs(dxy - dyx), dxy - dxz - dzy, std::abs(g.distance(x, x))});
    }
    le(r, worst, 1e-12 * L);
  });
  s.run("metric_graph", "edge_distance_bound", [&](CheckResult& r) {
    double worst = 0.0;
    const RngSpec local{opt.seed, 1};
    for (std::size_t k = 0; k < opt.triples; ++k) {
      const GraphPoint x = random_point(g, local, k);
      const GraphPoint y{x.edge, local.uniform(1'000'000 + k) * g.edge(x.edge).length};
      worst = std::max(worst, g.distance(x, y) - std::abs(x.t - y.t));
    }
    le(r, worst, 1e-12 * L);
  });
  s.run("metric_graph", "degree_slot_count", [&](CheckResult& r) {
    std::size_t total = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) total += g.slots(v).size();
    le(r, std::abs(static_cast<double>(total) - 2.0 * static_cast<double>(g.edge_count())), 0.0);
  });

  // spectral: one secular basis shared by the later modules.
  std::shared_ptr<const SpectralBasis> basis;
  s.run("spectral", "secular_solve", [&](CheckResult& r) {
    basis = std::make_shared<const SpectralBasis>(secular_eigensolve(g, opt.kappa, conds, opt.n));
    le(r, static_cast<double>(opt.n - basis->size()), 0.0);
  });
  if (!basis) return s.rows;
  const SpectralBasis& b = *basis;
  const std::size_t n = b.size();

  s.run("spectral", "orthonormality", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const SpectralCoefficients c = project(b.phi(j), basis);
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(c.c[i] - (i == j ? 1.0 : 0.0)));
    }
    le(r, worst, 1e-8);
  });
  s.run("spectral", "ordering", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, b.lambda(i - 1) - b.lambda(i));
    le(r, worst, 0.0);
  });
  s.run("spectral", "lambda1_above_kappa2", [&](CheckResult& r) {
    le(r, opt.kappa * opt.kappa - b.lambda(0), 1e-12 * (1.0 + b.lambda(0)));
  });
  s.run("spectral", "kirchhoff_residual", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, kirchhoff_residual_max(b, i) / std::sqrt(b.lambda(i)));
    r.note = "max over i of residual / sqrt(lambda_i)";
    le(r, worst, 1e-8);
  });
  s.run("spectral", "dirichlet_residual", [&](CheckResult& r) {
    double worst = 0.0;
    for (VertexId v : conds.dirichlet_vertices()) {
      for (const DirectionSlot& slot : g.slots(v)) {
        const GraphPoint x{slot.edge, slot.end == EdgeEnd::Start ? 0.0 : g.edge(slot.edge).length};
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(b.phi(i).value(x.edge, x.t)));
      }
    }
    le(r, worst, 1e-10);
  });
  s.run("spectral", "continuity_residual", [&](CheckResult& r) {
    double worst = 0.0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, vertex_jump(g, b.phi(i), v, 0));
    }
    le(r, worst, 1e-10);
  });
  s.run("spectral", "eigen_residual", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, eig_residual(b, i) / b.lambda(i));
    r.note = "max over i of residual / lambda_i";
    le(r, worst, 1e-8);
  });
  s.run("spectral", "weyl_sandwich", [&](CheckResult& r) {
    const WeylFit w = weyl_fit(b);
    double worst = 0.0;
    for (double q : w.ratios) worst = std::max({worst, w.A - q, q - w.B});
    r.note = "A=" + std::to_string(w.A) + " B=" + std::to_string(w.B);
    le(r, w.A > 0.0 ? worst : std::numeric_limits<double>::infinity(), 0.0);
  });
  s.run("spectral", "sup_norm_tail", [&](CheckResult& r) {
    const auto [head, tail] = head_tail(sup_norm_survey(b).per_mode);
    r.note = "tail max / head max";
    le(r, tail / head, 1.05);
  });
  for (unsigned j = 1; j <= 3; ++j) {
    s.run("spectral", "derivative_bound_tail_j" + std::to_string(j), [&](CheckResult& r) {
      const auto [head, tail] = head_tail(derivative_bound_survey(b, j).per_mode);
      r.note = "tail max / head max";
      le(r, tail / head, 1.05);
    });
  }
  s.run("spectral", "fem_cross_check", [&](CheckResult& r) {
    const double h = std::min(0.01, g.min_edge_length() / 8.0);
    const FemCrossCheck fc = fem_cross_check(g, opt.kappa, conds, h, std::min<std::size_t>(10, n));
    r.note = "h=" + std::to_string(h) + " mean order=" + std::to_string(fc.mean_order);
    le(r, fc.max_rel_error_extrapolated, 1e-3);
    if (!(std::abs(fc.mean_order - 2.0) <= 0.3)) r.pass = false;
  });

  // function_space
  s.run("function_space", "parity", [&](CheckResult& r) {
    const PiecewiseFunction& f = b.phi(std::min<std::size_t>(3, n - 1));
    double worst = 0.0;
    for (std::size_t k = 0; k < 50; ++k) {
      const GraphPoint x = random_point(g, RngSpec{opt.seed, 2}, k);
      const Parameterization flip = Parameterization::forward(g.edge_count()).with_flip(x.edge);
      for (unsigned j = 0; j <= 3; ++j) {
        const double a = edge_derivative(g, f, x, j), c = edge_derivative(g, f, x, j, flip);
        worst = std::max(worst, std::abs(a - (j % 2 ? -c : c)) / (1.0 + std::abs(a)));
      }
    }
    le(r, worst, 1e-12);
  });
  s.run("function_space", "seminorm_scaling", [&](CheckResult& r) {
    const PiecewiseFunction& f = b.phi(std::min<std::size_t>(1, n - 1));
    QuadratureConfig cfg;
    cfg.levels = 5;
    const double base = slobodeckij_seminorm(g, f, 0.25, 2.0, cfg).value;
    const double scaled = slobodeckij_seminorm(g, combine(-3.0, f, 0.0, f), 0.25, 2.0, cfg).value;
    const double shifted = slobodeckij_seminorm(g, combine(1.0, f, 1.0, PiecewiseFunction::constant(g, 2.5)), 0.25,
                                                2.0, cfg).value;
    le(r, std::max(rel(scaled, 3.0 * base), rel(shifted, base)), 1e-9);
  });

  // fractional
  SpectralCoefficients rc = SpectralCoefficients::zero(basis);
  for (std::size_t i = 0; i < n; ++i) rc.c[i] = RngSpec{opt.seed, 3}.normal(i) / static_cast<double>(i + 1);
  s.run("fractional", "semigroup", [&](CheckResult& r) {
    const auto ab = apply_fractional(apply_fractional(rc, 0.7), 1.3), direct = apply_fractional(rc, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, rel(ab.c[i], direct.c[i]));
    le(r, worst, 1e-12);
  });
  s.run("fractional", "isometry", [&](CheckResult& r) {
    const double lhs = dot_h_norm(apply_fractional(rc, 1.5), 0.5 - 1.5).value, rhs = dot_h_norm(rc, 0.5).value;
    le(r, rel(lhs, rhs), 1e-12);
  });
  s.run("fractional", "roundtrip", [&](CheckResult& r) {
    const auto back = solve_fractional(apply_fractional(rc, 2.5), 2.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, rel(back.c[i], rc.c[i]));
    le(r, worst, 1e-12);
  });
  s.run("fractional", "duality", [&](CheckResult& r) {
    const double beta = 1.0, norm = dot_h_norm(rc, -beta).value;
    SpectralCoefficients d = rc;
    for (std::size_t i = 0; i < n; ++i) d.c[i] = std::pow(b.lambda(i), -beta) * rc.c[i] / norm;
    double pairing = 0.0;
    for (std::size_t i = 0; i < n; ++i) pairing += rc.c[i] * d.c[i];
    le(r, std::max(rel(pairing, norm), rel(dot_h_norm(d, beta).value, 1.0)), 1e-12);
  });
  s.run("fractional", "parseval", [&](CheckResult& r) {
    const double l2 = lp_norm(synthesize(rc), 2.0, [&] {
      QuadratureConfig cfg;
      const double omega = std::sqrt(std::max(0.0, b.eigenvalues.back() - opt.kappa * opt.kappa));
      cfg.panels = static_cast<std::size_t>(std::ceil(2.0 * omega * g.max_edge_length() / std::numbers::pi)) + 8;
      return cfg;
    }());
    const double h0 = dot_h_norm(rc, 0.0).value;
    le(r, rel(l2 * l2, h0 * h0), 1e-8);
  });
  if (b.coefficients.is_constant()) {
    s.run("fractional", "second_derivative_sign_law", [&](CheckResult& r) {
      double worst = 0.0;
      for (std::size_t k = 0; k < 20; ++k) {
        const GraphPoint x = random_point(g, RngSpec{opt.seed, 4}, k);
        for (std::size_t i = 0; i < n; ++i) {
          const double d2 = b.derivative(i, x, 2), d0 = b.derivative(i, x, 0);
          worst = std::max(worst, std::abs(d2 + b.lambda_hat(i) * d0) / (1.0 + b.lambda(i)));
        }
      }
      le(r, worst, 1e-10);
    });
  }

  // sampler
  const double alpha = 2.0;
  s.run("sampler", "rng_reproducibility", [&](CheckResult& r) {
    const unsigned saved = thread_limit();
    set_thread_limit(1);
    const auto a = sample_fields(basis, alpha, opt.seed, 16);
    set_thread_limit(std::max(2u, saved));
    const auto c = sample_fields(basis, alpha, opt.seed, 16);
    set_thread_limit(saved);
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < a.size(); ++k) mismatches += a[k].coeffs.c != c[k].coeffs.c;
    le(r, static_cast<double>(mismatches), 0.0);
  });
  s.run("sampler", "gaussianity", [&](CheckResult& r) {
    // Kolmogorov-Smirnov on the white-noise coefficients of the first modes.
    const std::size_t modes = std::min<std::size_t>(20, n), m = std::max<std::size_t>(opt.samples, 100);
    const double crit = 1.628 / std::sqrt(static_cast<double>(m));
    std::size_t ok = 0;
    for (std::size_t i = 0; i < modes; ++i) {
      std::vector<double> z(m);
      for (std::size_t k = 0; k < m; ++k) z[k] = RngSpec{opt.seed, k}.normal(i);
      std::sort(z.begin(), z.end());
      double d = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double cdf = 0.5 * std::erfc(-z[k] / std::numbers::sqrt2);
        d = std::max({d, std::abs(cdf - static_cast<double>(k) / m), std::abs(cdf - static_cast<double>(k + 1) / m)});
      }
      ok += d < crit;
    }
    r.note = "fraction of modes below the 1% KS critical value";
    r.value = static_cast<double>(ok) / static_cast<double>(modes);
    r.threshold = 0.95;
    r.pass = r.value >= r.threshold;
  });
  s.run("sampler", "covariance_symmetry", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t k = 0; k < 20; ++k) {
      const GraphPoint x = random_point(g, RngSpec{opt.seed, 5}, 2 * k), y = random_point(g, RngSpec{opt.seed, 5}, 2 * k + 1);
      worst = std::max(worst, rel(covariance_series(b, alpha, x, y).value, covariance_series(b, alpha, y, x).value));
    }
    le(r, worst, 1e-12);
  });
  s.run("sampler", "covariance_match", [&](CheckResult& r) {
    const auto fields = sample_fields(basis, alpha, opt.seed, std::max<std::size_t>(opt.samples, 100));
    const std::size_t pairs = 20;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const GraphPoint x = random_point(g, RngSpec{opt.seed, 6}, 2 * k), y = random_point(g, RngSpec{opt.seed, 6}, 2 * k + 1);
      const EmpiricalCovariance e = empirical_covariance(fields, x, y);
      ok += std::abs(e.covariance - covariance_series(b, alpha, x, y).value) <= e.ci_half_width;
    }
    r.note = "fraction of probe pairs within the 99% interval";
    r.value = static_cast<double>(ok) / static_cast<double>(pairs);
    r.threshold = 0.95;
    r.pass = r.value >= r.threshold;
  });
  s.run("sampler", "norm_curve_dichotomy", [&](CheckResult& r) {
    const NormCurve lo = expected_norm_curve(b, alpha, alpha - 0.6), hi = expected_norm_curve(b, alpha, alpha - 0.4);
    r.note = "bounded at s=alpha-0.6: " + to_string(lo.behaviour) + ", at s=alpha-0.4: " + to_string(hi.behaviour);
    r.value = lo.term_decay - hi.term_decay;
    r.threshold = 0.0;
    r.pass = lo.behaviour == SeriesBehaviour::Bounded && hi.behaviour == SeriesBehaviour::Divergent;
  });
  s.run("sampler", "energy_identity", [&](CheckResult& r) {
    le(r, gff_energy_check(basis, random_point(g, RngSpec{opt.seed, 7}, 0), 1.0).relative_difference, 1e-8);
  });
  return s.rows;
}

}  // namespace graphlaplace
