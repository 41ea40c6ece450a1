#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "graphlaplace/error.hpp"
#include "graphlaplace/fractional.hpp"
#include "graphlaplace/sampler.hpp"
#include "support.hpp"

using namespace graphlaplace;
using std::numbers::pi;
using test_support::rel_err;
using test_support::shipped;

namespace {

std::shared_ptr<const SpectralBasis> basis_of(const char* name, std::size_t n, double kappa = 1.0) {
  const auto f = shipped(name);
  return std::make_shared<const SpectralBasis>(secular_eigensolve(f.graph, kappa, f.conditions, n));
}

SpectralCoefficients random_coeffs(std::shared_ptr<const SpectralBasis> b, std::uint64_t stream) {
  auto c = SpectralCoefficients::zero(b);
  const RngSpec rng{42, stream};
  for (std::size_t i = 0; i < c.c.size(); ++i) c.c[i] = rng.normal(i);
  return c;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
  return m;
}

}  // namespace

TEST_CASE("projection examples") {
  const auto b = basis_of("interval", 12);
  const auto e3 = project(b->phi(2), b);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(e3.c[i] - (i == 2 ? 1.0 : 0.0)) <= 1e-8);
  for (double v : project(PiecewiseFunction::constant(b->graph, 0.0), b).c) CHECK(v == 0.0);
  const auto one = project(PiecewiseFunction::constant(b->graph, 1.0), b);
  CHECK(one.c[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < 12; ++i) CHECK(std::abs(one.c[i]) <= 1e-10);

  const auto s = basis_of("star3_robin", 15);
  const auto c = random_coeffs(s, 1);
  CHECK(max_rel_diff(project(synthesize(c), s).c, c.c) <= 1e-7);
}

TEST_CASE("dot-H norms") {
  const auto b = basis_of("interval", 100);
  for (double beta : {-1.3, 0.0, 0.5, 2.0}) {
    CHECK(dot_h_norm(SpectralCoefficients::unit(b, 7), beta).value ==
          doctest::Approx(std::pow(b->lambda(7), beta / 2.0)).epsilon(1e-14));
  }
  const auto c = random_coeffs(b, 2);
  double e = 0.0;
  for (double v : c.c) e += v * v;
  CHECK(dot_h_norm(c, 0.0).value == doctest::Approx(std::sqrt(e)).epsilon(1e-13));

  // White-noise-like coefficients at beta = -1: direct sum of (1 + ((i - 1) pi)^2)^-1.
  auto ones = SpectralCoefficients::zero(b);
  std::fill(ones.c.begin(), ones.c.end(), 1.0);
  double direct = 0.0;
  for (int i = 99; i >= 0; --i) direct += 1.0 / (1.0 + i * i * pi * pi);
  const auto n = dot_h_norm(ones, -1.0);
  CHECK(n.value * n.value == doctest::Approx(direct).epsilon(1e-12));
  CHECK_FALSE(n.tail_divergent);
  // Tail of sum_{i >= 100} 1 / (i pi)^2 ~ 1 / (100 pi^2).
  CHECK(n.tail_sq == doctest::Approx(1.0 / (100.0 * pi * pi)).epsilon(0.1));
  CHECK(dot_h_norm(ones, 1.0).tail_divergent);
}

TEST_CASE("fractional powers: identities on random vectors") {
  const auto b = basis_of("star3", 500);
  const auto c = random_coeffs(b, 3);
  CHECK(apply_fractional(c, 0.0).c == c.c);
  CHECK(max_rel_diff(apply_fractional(apply_fractional(c, 0.7), -0.7).c, c.c) <= 1e-13);
  CHECK(max_rel_diff(apply_fractional(apply_fractional(c, 0.7), 1.9).c, apply_fractional(c, 2.6).c) <= 1e-12);
  CHECK(max_rel_diff(solve_fractional(apply_fractional(c, 1.3), 1.3).c, c.c) <= 1e-12);
  CHECK(max_rel_diff(apply_fractional(solve_fractional(c, 1.3), 1.3).c, c.c) <= 1e-12);
  for (double beta : {-0.5, 1.0, 2.25}) {
    CHECK(rel_err(dot_h_norm(apply_fractional(c, 1.6), beta - 1.6).value, dot_h_norm(c, beta).value) <= 1e-12);
  }
  const auto e4 = apply_fractional(SpectralCoefficients::unit(b, 4), 2.0);
  CHECK(e4.c[4] == doctest::Approx(b->lambda(4)).epsilon(1e-15));
  CHECK_THROWS_AS(solve_fractional(c, 0.0), Error);
}

TEST_CASE("solve of L u = 1 on the Neumann interval") {
  const auto b = basis_of("interval", 40, 1.5);
  const auto f = PiecewiseFunction::constant(b->graph, 1.0);
  const auto u = synthesize(solve_fractional(project(f, b), 2.0));
  const auto fem = fem_solve(b->graph, CoefficientField::constant(b->graph, 1.5), b->conditions, f, 0.01);
  for (double t : {0.0, 0.4, 1.0}) {
    CHECK(u.value(0, t) == doctest::Approx(1.0 / 2.25).epsilon(1e-10));
    CHECK(fem.u.value(0, t) == doctest::Approx(1.0 / 2.25).epsilon(1e-10));
  }
}

TEST_CASE("spectral derivatives") {
  const auto b = basis_of("star3", 40);
  const GraphPoint x{1, 0.37};
  for (std::size_t i : {3u, 10u}) {
    const auto d2 = spectral_derivative(SpectralCoefficients::unit(b, i), 2, x);
    CHECK(std::abs(d2.value + b->lambda_hat(i) * b->phi(i).value(1, 0.37)) <= 1e-8 * b->lambda(i));
  }
  const auto c = solve_fractional(random_coeffs(b, 4), 4.0);
  CHECK(spectral_derivative(c, 0, x).value == doctest::Approx(synthesize(c).value(1, 0.37)).epsilon(1e-12));

  // c_i = lambda_i^-2: outgoing first derivatives at the centre balance.
  auto decay = SpectralCoefficients::zero(b);
  for (std::size_t i = 0; i < b->size(); ++i) decay.c[i] = std::pow(b->lambda(i), -2.0);
  const VertexId centre = *b->graph.find_vertex("c");
  double flux = 0.0;
  for (EdgeId e = 0; e < 3; ++e) flux += spectral_derivative(decay, 1, {e, 0.0}).value;
  CHECK(std::abs(flux) <= 1e-10);
  CHECK(b->graph.edge(0).tail == centre);

  // White-noise envelope cannot carry a derivative.
  CHECK_THROWS_AS(spectral_derivative(random_coeffs(b, 5), 1, x), Error);
}

TEST_CASE("regularity report: eigenfunctions pass everything") {
  const auto b = basis_of("lollipop", 40);
  for (double alpha : {0.3, 1.2, 2.9, 6.2}) {
    const auto r = regularity_report(SpectralCoefficients::unit(b, 0), alpha);
    CHECK(r.diagnostics_pass);
    CHECK(r.verdict == Verdict::Member);
    CHECK(r.kirchhoff_images == static_cast<unsigned>(std::floor(alpha / 2 + 0.25)));
    CHECK(r.dirichlet_images == static_cast<unsigned>(std::floor(alpha / 2 + 0.75)));
  }
  CHECK_THROWS_AS(regularity_report(SpectralCoefficients::unit(b, 0), 1.5), Error);
}

TEST_CASE("regularity report: partial-sum dichotomy") {
  // c_i = lambda_i^{-s/2} / i: sum lambda_i^{a - s} / i^2 converges iff a < s + 1/2.
  const auto b = basis_of("star3", 300);
  const double s = 1.0;
  auto c = SpectralCoefficients::zero(b);
  for (std::size_t i = 0; i < b->size(); ++i) c.c[i] = std::pow(b->lambda(i), -s / 2.0) / (i + 1.0);
  const auto low = regularity_report(c, 1.2);
  CHECK(low.series == SeriesBehaviour::Bounded);
  CHECK(low.verdict == Verdict::Member);
  const auto high = regularity_report(c, 2.2);
  CHECK(high.series == SeriesBehaviour::Divergent);
  CHECK(high.verdict == Verdict::NotMember);
  // Terms lambda_i^{a - s} / i^2 ~ i^{2(a - s) - 2}.
  CHECK(high.term_decay == doctest::Approx(-0.4).epsilon(0.15));
}

TEST_CASE("regularity report: an edge indicator fails continuity above 1/2") {
  const auto b = basis_of("star3", 200);
  const auto ind = PiecewiseFunction::edge_indicator(b->graph, 0);
  const auto c = project(ind, b);
  const auto low = regularity_report(c, 0.3, ind);
  CHECK(low.diagnostics_pass);
  const auto high = regularity_report(c, 0.75, ind);
  CHECK_FALSE(high.diagnostics_pass);
  CHECK(high.verdict == Verdict::NotMember);
  bool jump = false;
  for (const auto& d : high.vertex) jump |= d.check == "continuity" && d.subject == "source" && !d.pass;
  CHECK(jump);
}

TEST_CASE("regularity report: smooth solve carries Kirchhoff images") {
  const auto b = basis_of("star3", 120);
  const auto f = PiecewiseFunction::sample(b->graph, [](EdgeId e, double t) { return std::cos(pi * t) + 0.1 * e; }, 257);
  const auto u = solve_fractional(project(f, b), 4.0);
  const auto r = regularity_report(u, 4.0);
  CHECK(r.kirchhoff_images == 2);
  for (const auto& d : r.vertex) {
    if (d.check == "kirchhoff") CHECK(d.value <= 1e-6);
  }
  CHECK(r.diagnostics_pass);
  CHECK_FALSE(r.to_text(b->graph).empty());
}
