#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace graphlaplace {

/// Gauss-Legendre rule on [-1, 1] with m nodes.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per m; thread-safe.
const GaussRule& gauss_legendre(std::size_t m);

/// Pairwise (cascade) summation: deterministic for a fixed input order.
double pairwise_sum(std::span<const double> values);

/// Fornberg finite-difference weights for derivative `order` at x0 given
/// the stencil abscissae.
std::vector<double> fd_weights(double x0, std::span<const double> xs, unsigned order);

/// Least-squares line fit y = a + b x; returns {a, b, r_squared}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Worker cap for internal parallel loops (0 = hardware concurrency).
void set_thread_limit(unsigned n);
unsigned thread_limit();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write into per-index slots so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace graphlaplace
