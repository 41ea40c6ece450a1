#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graphlaplace/error.hpp"
#include "graphlaplace/spectral.hpp"
#include "support.hpp"

using namespace graphlaplace;
using std::numbers::pi;
using test_support::rel_err;
using test_support::shipped;

namespace {

double inner(const SpectralBasis& b, std::size_t i, std::size_t j) {
  const double d = lp_norm(combine(1.0, b.phi(i), -1.0, b.phi(j)), 2.0);
  const double ni = lp_norm(b.phi(i), 2.0), nj = lp_norm(b.phi(j), 2.0);
  return (ni * ni + nj * nj - d * d) / 2.0;
}

// Equilateral Kirchhoff 3-star with unit legs: cos w = 0 gives a double
// eigenvalue (legs summing to zero), sin w = 0 a simple one.
std::vector<double> star_spectrum(double kappa, std::size_t n) {
  std::vector<double> out{kappa * kappa};
  for (int k = 0; out.size() < n; ++k) {
    const double half = (k + 0.5) * pi, whole = (k + 1) * pi;
    out.push_back(kappa * kappa + half * half);
    out.push_back(kappa * kappa + half * half);
    out.push_back(kappa * kappa + whole * whole);
  }
  out.resize(n);
  return out;
}

// k-th root of w tan w = c on ((k-1) pi, (k - 1/2) pi) by bisection.
double robin_root(double c, int k) {
  double lo = (k - 1) * pi + 1e-14, hi = (k - 0.5) * pi - 1e-14;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tan(mid) < c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("Neumann interval spectrum and eigenfunctions") {
  const auto f = shipped("interval");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 20);
  REQUIRE(b.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    const double w = i * pi;
    CHECK(rel_err(b.lambda(i), 1.0 + w * w) <= 1e-8);
    CHECK(b.multiplicity[i] == 1);
    const double expect = i == 0 ? 1.0 : std::sqrt(2.0) * std::cos(w * 0.3);
    CHECK(std::abs(std::abs(b.phi(i).value(0, 0.3)) - std::abs(expect)) <= 1e-8);
  }
  CHECK(b.phi(0).value(0, 0.7) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Dirichlet interval spectrum") {
  const auto f = shipped("interval_dirichlet");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    const double w = (i + 1) * pi;
    CHECK(rel_err(b.lambda(i), 1.0 + w * w) <= 1e-8);
    CHECK(std::abs(std::abs(b.phi(i).value(0, 0.2)) - std::abs(std::sqrt(2.0) * std::sin(w * 0.2))) <= 1e-8);
  }
}

TEST_CASE("circle spectrum has double multiplicity") {
  const auto f = shipped("circle");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 21);
  CHECK(rel_err(b.lambda(0), 1.0) <= 1e-12);
  CHECK(b.multiplicity[0] == 1);
  for (std::size_t i = 1; i < 21; ++i) {
    const double w = 2.0 * pi * ((i + 1) / 2);
    CHECK(rel_err(b.lambda(i), 1.0 + w * w) <= 1e-8);
    CHECK(b.multiplicity[i] == 2);
  }
  CHECK(std::abs(inner(b, 1, 2)) <= 1e-8);
}

TEST_CASE("truncation inside a cluster keeps the full multiplicity") {
  const auto f = shipped("circle");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 6);
  CHECK(b.multiplicity.back() == 2);
}

TEST_CASE("equilateral star against separation of variables") {
  const auto f = shipped("star3");
  const auto b = secular_eigensolve(f.graph, 0.7, f.conditions, 25);
  const auto exact = star_spectrum(0.7, 25);
  for (std::size_t i = 0; i < 25; ++i) CHECK(rel_err(b.lambda(i), exact[i]) <= 1e-8);
  CHECK(b.multiplicity[1] == 2);
  CHECK(b.multiplicity[3] == 1);
}

TEST_CASE("Robin end against w tan w = c") {
  const auto g = shipped("interval").graph;
  VertexConditionSet conds(2);
  conds.set(*g.find_vertex("b"), VertexCondition::robin(0.5));
  const auto b = secular_eigensolve(g, 1.0, conds, 8);
  for (int k = 1; k <= 8; ++k) {
    const double w = robin_root(0.5, k);
    CHECK(rel_err(b.lambda(k - 1), 1.0 + w * w) <= 1e-8);
  }
  CHECK(kirchhoff_residual_max(b, 3) <= 1e-8 * std::sqrt(b.lambda(3)));
}

TEST_CASE("basis invariants on a mixed-condition star") {
  const auto f = shipped("star3_robin");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 30);
  const VertexId p3 = *f.graph.find_vertex("p3");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i > 0) CHECK(b.lambda(i) >= b.lambda(i - 1));
    CHECK(std::abs(lp_norm(b.phi(i), 2.0) - 1.0) <= 1e-8);
    CHECK(kirchhoff_residual_max(b, i) <= 1e-8 * std::sqrt(b.lambda(i)));
    CHECK(std::abs(evaluate(f.graph, b.phi(i), f.graph.vertex_point(p3))) <= 1e-10);
    CHECK(eig_residual(b, i) <= 1e-8 * b.lambda(i));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = i + 1; j < 10; ++j) CHECK(std::abs(inner(b, i, j)) <= 1e-8);
  }
}

TEST_CASE("close roots on the Dirichlet lollipop are all found") {
  // omega = 2 pi and a neighbour near 6.47 sit within one scan step.
  const auto f = shipped("lollipop_dirichlet");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 15);
  const auto fem = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 400, 15);
  for (std::size_t i = 0; i < 15; ++i) CHECK(rel_err(b.lambda(i), fem.lambda(i)) <= 1e-3);
  const double target = 1.0 + 4.0 * pi * pi;
  CHECK(std::any_of(b.eigenvalues.begin(), b.eigenvalues.end(),
                    [&](double l) { return rel_err(l, target) <= 1e-10; }));
}

TEST_CASE("FEM eigenvalues converge to the analytic spectrum") {
  const auto f = shipped("interval");
  const auto fem = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 200, 10);
  const auto fem2 = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 400, 10);
  for (std::size_t i = 1; i < 10; ++i) {
    // Consistent-mass P1: lambda_h - lambda ~ w^2 (w h)^2 / 12.
    const double w = i * pi, exact = 1.0 + w * w;
    CHECK((fem.lambda(i) - exact) / (w * w * w * w / (12.0 * 200 * 200)) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rel_err((4.0 * fem2.lambda(i) - fem.lambda(i)) / 3.0, exact) <= 1e-5);
  }
  CHECK(fem.path == SolverPath::FEM);

  const auto star = shipped("star3");
  const auto cc = fem_cross_check(star.graph, 1.0, star.conditions, 1.0 / 100, 10);
  CHECK(cc.max_rel_error_extrapolated <= 1e-3);
  CHECK(cc.max_rel_error_extrapolated < cc.max_rel_error_half);
  CHECK(cc.mean_order == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Poincare: kappa = 0 with a Dirichlet end") {
  const auto g = shipped("interval").graph;
  VertexConditionSet conds(2);
  conds.set(*g.find_vertex("a"), VertexCondition::dirichlet());
  const auto fem = fem_eigensolve(g, CoefficientField::constant(g, 0.0), conds, 1.0 / 200, 3);
  CHECK(fem.lambda(0) > 0.0);
  CHECK(rel_err(fem.lambda(0), pi * pi / 4.0) <= 1e-3);
  CHECK_THROWS_AS(fem_eigensolve(g, CoefficientField::constant(g, 0.0), VertexConditionSet(2), 1.0 / 200, 3), Error);
}

TEST_CASE("eigen residuals") {
  const auto f = shipped("interval");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(eig_residual(b, i) <= 1e-8 * b.lambda(i));
    CHECK(eig_residual(b, i, 64, b.lambda(i) + 0.1) >= 0.1);
  }
  const auto fem = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 200, 4);
  const auto fem2 = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 400, 4);
  CHECK(eig_residual(fem2, 2) < eig_residual(fem, 2));
}

TEST_CASE("Weyl sandwich") {
  const auto f = shipped("interval");
  const auto w = weyl_fit(secular_eigensolve(f.graph, 1.0, f.conditions, 50));
  CHECK(w.A > 0.0);
  CHECK(w.A <= w.B);
  CHECK(w.B < 12.0);
  CHECK(w.ratios.back() == doctest::Approx(pi * pi).epsilon(0.05));

  const auto c = shipped("circle");
  const auto wc = weyl_fit(secular_eigensolve(c.graph, 1.0, c.conditions, 50));
  CHECK(wc.A > 0.0);
  CHECK(wc.B <= 4.0 * pi * pi + 2.0);
  CHECK(wc.ratios.back() == doctest::Approx(pi * pi).epsilon(0.01));
}

TEST_CASE("sup norm and derivative surveys") {
  for (const char* name : {"interval", "interval_dirichlet"}) {
    const auto f = shipped(name);
    const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 30);
    CHECK(sup_norm_survey(b).constant == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(derivative_bound_survey(b, 0).constant == doctest::Approx(sup_norm_survey(b).constant).epsilon(1e-14));
    CHECK(derivative_bound_survey(b, 1).constant <= std::sqrt(2.0) + 1e-12);
    CHECK(derivative_bound_survey(b, 2).constant <= std::sqrt(2.0) + 1e-12);
  }
  const auto f = shipped("interval");
  const auto b = secular_eigensolve(f.graph, 1.0, f.conditions, 10);
  const auto d1 = derivative_bound_survey(b, 1);
  for (std::size_t i = 1; i < 10; ++i) {
    const double w = i * pi;
    CHECK(d1.per_mode[i] == doctest::Approx(std::sqrt(2.0) * w / std::sqrt(1.0 + w * w)).epsilon(1e-10));
  }
  const auto fem = fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 1.0 / 100, 5);
  CHECK_THROWS_AS(derivative_bound_survey(fem, 2), Error);
}

TEST_CASE("star sup norm stabilises") {
  const auto f = shipped("star3");
  const double c20 = sup_norm_survey(secular_eigensolve(f.graph, 1.0, f.conditions, 20)).constant;
  const double c60 = sup_norm_survey(secular_eigensolve(f.graph, 1.0, f.conditions, 60)).constant;
  CHECK(c60 == doctest::Approx(c20).epsilon(1e-8));
}

TEST_CASE("fem_solve examples") {
  const auto f = shipped("star3");
  const auto coeffs = CoefficientField::constant(f.graph, 1.5);
  const auto one = fem_solve(f.graph, coeffs, f.conditions, PiecewiseFunction::constant(f.graph, 2.25), 0.01);
  for (double t : {0.0, 0.33, 1.0}) CHECK(one.u.value(1, t) == doctest::Approx(1.0).epsilon(1e-10));

  const auto eig = fem_eigensolve(f.graph, coeffs, f.conditions, 0.01, 4);
  const auto ui = fem_solve(f.graph, coeffs, f.conditions, eig.phi(3), 0.01);
  const double err = lp_norm(combine(1.0, ui.u, -1.0 / eig.lambda(3), eig.phi(3)), 2.0);
  CHECK(err <= 1e-8);

  // u* = t(1 - t) on the Dirichlet interval with a = kappa = 1.
  const auto d = shipped("interval_dirichlet");
  const auto c1 = CoefficientField::constant(d.graph, 1.0);
  const auto rhs = PiecewiseFunction::sample(d.graph, [](EdgeId, double t) { return t * (1 - t) + 2.0; }, 2001);
  const auto exact = PiecewiseFunction::sample(d.graph, [](EdgeId, double t) { return t * (1 - t); }, 2001);
  const double e1 = lp_norm(combine(1.0, fem_solve(d.graph, c1, d.conditions, rhs, 1.0 / 20).u, -1.0, exact), 2.0);
  const double e2 = lp_norm(combine(1.0, fem_solve(d.graph, c1, d.conditions, rhs, 1.0 / 40).u, -1.0, exact), 2.0);
  CHECK(e1 <= 1e-3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("spectral errors") {
  const auto f = shipped("interval");
  SecularOptions opt;
  opt.omega_budget = 5.0;
  CHECK_THROWS_AS(secular_eigensolve(f.graph, 1.0, f.conditions, 20, opt), Error);
  try {
    fem_eigensolve(f.graph, CoefficientField::constant(f.graph, 1.0), f.conditions, 0.5, 2);
    FAIL("expected MeshTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MeshTooCoarse);
  }
  const auto neg = PiecewiseFunction::constant(f.graph, -1.0);
  CHECK_THROWS_AS(CoefficientField::make(f.graph, PiecewiseFunction::constant(f.graph, 1.0), neg), Error);
}
