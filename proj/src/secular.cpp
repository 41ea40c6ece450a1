// Secular (exact) eigensolver for kappa^2 - Laplacian with constant kappa.
//
// Per edge: u(t) = A cos(w t) + B s sin(w t) / w with s = max(1, w), which
// degenerates to A + B t at w = 0, so one matrix family covers both cases.
// Each direction slot contributes one row: continuity differences plus a
// flux balance (Kirchhoff/Robin) or point values (Dirichlet). Derivative
// rows are divided by s to keep the columns comparably scaled.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "graphlaplace/error.hpp"
#include "graphlaplace/numerics.hpp"
#include "graphlaplace/spectral.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "spectral";

double sinc_t(double omega, double t) { return omega > 0.0 ? std::sin(omega * t) / omega : t; }

Eigen::MatrixXd secular_matrix(const MetricGraph& g, const VertexConditionSet& conds, double omega) {
  const std::size_t E = g.edge_count();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * E), static_cast<Eigen::Index>(2 * E));
  const double s = std::max(1.0, omega);
  auto add_value = [&](Eigen::Index r, const DirectionSlot& sl, double coef) {
    const double t = sl.end == EdgeEnd::Start ? 0.0 : g.edge(sl.edge).length;
    const auto c = static_cast<Eigen::Index>(2 * sl.edge);
    M(r, c) += coef * std::cos(omega * t);
    M(r, c + 1) += coef * s * sinc_t(omega, t);
  };
  auto add_flux = [&](Eigen::Index r, const DirectionSlot& sl) {
    const double t = sl.end == EdgeEnd::Start ? 0.0 : g.edge(sl.edge).length;
    const double sign = sl.end == EdgeEnd::Start ? 1.0 : -1.0;
    const auto c = static_cast<Eigen::Index>(2 * sl.edge);
    M(r, c) += sign * (-omega * std::sin(omega * t)) / s;
    M(r, c + 1) += sign * std::cos(omega * t);
  };
  Eigen::Index row = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto slots = g.slots(v);
    const VertexCondition& c = conds.at(v);
    if (c.kind == VertexConditionKind::Dirichlet) {
      for (const auto& sl : slots) add_value(row++, sl, 1.0);
      continue;
    }
    for (std::size_t k = 1; k < slots.size(); ++k) {
      add_value(row, slots[k], 1.0);
      add_value(row, slots[0], -1.0);
      ++row;
    }
    for (const auto& sl : slots) add_flux(row, sl);
    if (c.kind == VertexConditionKind::Robin) add_value(row, slots[0], -c.weight / s);
    ++row;
  }
  return M;
}

// Number of eigenvalues of -Laplacian strictly below k^2, k > 0. The energy
// form minus k^2 splits into edgewise Dirichlet parts plus its restriction to
// k-harmonic extensions of vertex values, so the count is the Dirichlet
// eigenvalues of the edges below k^2 plus the negative index of the vertex
// matrix Q(k). Empty when k is too close to a pole of Q or to a zero
// eigenvalue of Q for the inertia to be trusted.
std::optional<std::size_t> count_below(const MetricGraph& g, const VertexConditionSet& conds, double k) {
  std::vector<Eigen::Index> index(g.vertex_count(), -1);
  Eigen::Index m = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!conds.is_dirichlet(v)) index[v] = m++;
  }
  std::size_t count = 0;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (index[v] >= 0 && conds.at(v).kind == VertexConditionKind::Robin) Q(index[v], index[v]) += conds.at(v).weight;
  }
  for (const Edge& e : g.edges()) {
    const double x = k * e.length;
    count += static_cast<std::size_t>(std::ceil(x / std::numbers::pi)) - 1;
    const Eigen::Index a = index[e.tail], b = index[e.head];
    if (e.is_loop()) {
      // Both ends carry the same value: 2k cot(x) - 2k / sin(x) = -2k tan(x / 2).
      if (std::abs(std::cos(x / 2.0)) < 1e-3) return std::nullopt;
      if (a >= 0) Q(a, a) -= 2.0 * k * std::tan(x / 2.0);
      continue;
    }
    const double sn = std::sin(x);
    if (std::abs(sn) < 1e-3) return std::nullopt;
    const double diag = k * std::cos(x) / sn, off = -k / sn;
    if (a >= 0) Q(a, a) += diag;
    if (b >= 0) Q(b, b) += diag;
    if (a >= 0 && b >= 0) {
      Q(a, b) += off;
      Q(b, a) += off;
    }
  }
  if (m > 0) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues();
    const double big = std::max(ev.cwiseAbs().maxCoeff(), k);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(ev(i)) < 1e-9 * big) return std::nullopt;
      count += ev(i) < 0.0;
    }
  }
  return count;
}

struct Root {
  double omega = 0.0;
  std::vector<std::vector<Sinusoid>> functions;
};

double edge_inner(const Sinusoid& p, const Sinusoid& q, double l) {
  const double w = p.omega;
  if (w == 0.0) {
    return p.a * q.a * l + (p.a * q.b + p.b * q.a) * l * l / 2.0 + p.b * q.b * l * l * l / 3.0;
  }
  const double cc = l / 2.0 + std::sin(2.0 * w * l) / (4.0 * w);
  const double ss = l / 2.0 - std::sin(2.0 * w * l) / (4.0 * w);
  const double cs = std::sin(w * l) * std::sin(w * l) / (2.0 * w);
  return p.a * q.a * cc + (p.a * q.b + p.b * q.a) * cs + p.b * q.b * ss;
}

double graph_inner(const MetricGraph& g, const std::vector<Sinusoid>& p, const std::vector<Sinusoid>& q) {
  std::vector<double> parts(p.size());
  for (std::size_t e = 0; e < p.size(); ++e) parts[e] = edge_inner(p[e], q[e], g.edge(e).length);
  return pairwise_sum(parts);
}

void scale(std::vector<Sinusoid>& f, double c) {
  for (auto& s : f) {
    s.a *= c;
    s.b *= c;
  }
}

void fix_sign(std::vector<Sinusoid>& f) {
  double big = 0.0;
  for (const auto& s : f) big = std::max({big, std::abs(s.a), std::abs(s.b)});
  for (const auto& s : f) {
    for (double v : {s.a, s.b}) {
      if (std::abs(v) > 1e-8 * big) {
        if (v < 0.0) scale(f, -1.0);
        return;
      }
    }
  }
}

Root make_root(const MetricGraph& g, const Eigen::JacobiSVD<Eigen::MatrixXd>& svd, double omega, std::size_t nullity) {
  Root root;
  root.omega = omega;
  const Eigen::MatrixXd& V = svd.matrixV();
  const Eigen::Index n = V.cols();
  const double s = std::max(1.0, omega);
  for (std::size_t k = 0; k < nullity; ++k) {
    const auto col = n - 1 - static_cast<Eigen::Index>(k);
    std::vector<Sinusoid> f(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const double A = V(static_cast<Eigen::Index>(2 * e), col);
      const double B = V(static_cast<Eigen::Index>(2 * e + 1), col);
      f[e] = {A, omega > 0.0 ? B * s / omega : B, omega};
    }
    root.functions.push_back(std::move(f));
  }
  // Modified Gram-Schmidt in the exact L2 inner product.
  for (std::size_t k = 0; k < root.functions.size(); ++k) {
    auto& fk = root.functions[k];
    for (std::size_t j = 0; j < k; ++j) {
      const double c = graph_inner(g, root.functions[j], fk);
      for (std::size_t e = 0; e < fk.size(); ++e) {
        fk[e].a -= c * root.functions[j][e].a;
        fk[e].b -= c * root.functions[j][e].b;
      }
    }
    const double nrm = std::sqrt(graph_inner(g, fk, fk));
    if (!(nrm > 0.0)) throw Error(ErrorCode::IllConditionedCluster, kModule, "null vectors are linearly dependent");
    scale(fk, 1.0 / nrm);
  }
  for (auto& f : root.functions) fix_sign(f);
  return root;
}

std::size_t nullity_of(const Eigen::VectorXd& sv, double threshold) {
  // Entries of M are O(1) by construction; at a root where every singular
  // value vanishes (e.g. a single loop) sigma_max is no usable reference.
  const double smax = std::max(sv(0), 1.0);
  std::size_t k = 0;
  for (Eigen::Index i = sv.size() - 1; i >= 0 && sv(i) < threshold * smax; --i) ++k;
  return k;
}

template <class F>
double golden_min(const F& f, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-15 * (1.0 + hi)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

double Sinusoid::derivative(double t, unsigned order) const {
  if (omega == 0.0) {
    if (order == 0) return a + b * t;
    return order == 1 ? b : 0.0;
  }
  const double c = std::cos(omega * t), s = std::sin(omega * t);
  double v = 0.0;
  switch (order % 4) {
    case 0: v = a * c + b * s; break;
    case 1: v = -a * s + b * c; break;
    case 2: v = -a * c - b * s; break;
    default: v = a * s - b * c; break;
  }
  return v * std::pow(omega, static_cast<double>(order));
}

double Sinusoid::sup(double length, unsigned order) const {
  if (omega == 0.0) {
    if (order == 0) return std::max(std::abs(a), std::abs(a + b * length));
    return order == 1 ? std::abs(b) : 0.0;
  }
  // The order-th derivative is R cos(omega t - theta) with these coefficients.
  double ca = a, cb = b;
  switch (order % 4) {
    case 1: ca = b; cb = -a; break;
    case 2: ca = -a; cb = -b; break;
    case 3: ca = -b; cb = a; break;
    default: break;
  }
  const double scale = std::pow(omega, static_cast<double>(order));
  const double R = std::hypot(ca, cb);
  const double theta = std::atan2(cb, ca);
  const double k = std::ceil(-theta / std::numbers::pi);
  if ((theta + k * std::numbers::pi) / omega <= length) return R * scale;
  return std::max(std::abs(derivative(0.0, order)), std::abs(derivative(length, order)));
}

double secular_sigma_min(const MetricGraph& g, const VertexConditionSet& conds, double omega) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(secular_matrix(g, conds, omega));
  return svd.singularValues()(svd.singularValues().size() - 1);
}

SpectralBasis secular_eigensolve(const MetricGraph& g, double kappa, const VertexConditionSet& conds, std::size_t n,
                                 const SecularOptions& opt) {
  conds.check_against(g);
  if (n == 0) throw Error(ErrorCode::BadArgument, kModule, "requested zero eigenpairs");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error(ErrorCode::BadArgument, kModule, "kappa must be >= 0");
  if (kappa == 0.0 && !conds.has_dirichlet()) {
    throw Error(ErrorCode::NonPositiveOperator, kModule,
                "kappa = 0 without Dirichlet vertices leaves a zero eigenvalue (operator not positive)");
  }
  const double L = g.total_length();
  const double step = opt.scan_step > 0.0 ? opt.scan_step : std::numbers::pi / (8.0 * L);
  const double budget = opt.omega_budget > 0.0
                            ? opt.omega_budget
                            : 2.0 * std::numbers::pi * static_cast<double>(n + 2 * g.edge_count() + 8) / L;
  const double thr = opt.null_threshold;

  std::vector<Root> roots;
  std::size_t count = 0;
  auto try_root = [&](double omega) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(secular_matrix(g, conds, omega), Eigen::ComputeFullV);
    const std::size_t k = nullity_of(svd.singularValues(), thr);
    if (k == 0) return;
    for (const Root& r : roots) {
      if (std::abs(r.omega - omega) <= 1e-10 * (1.0 + omega)) return;
    }
    roots.push_back(make_root(g, svd, omega, k));
    count += k;
  };
  try_root(0.0);

  const auto sigma = [&](double w) { return secular_sigma_min(g, conds, w); };
  // Scan in parallel blocks; each block is processed in order.
  constexpr std::size_t kBlock = 128;
  std::vector<double> grid_sigma{sigma(0.0), sigma(step)};
  std::size_t next = 2;  // index of the next grid point to evaluate
  std::size_t k = 1;     // candidate interior index
  while (count < n) {
    if (k + 1 >= next) {
      if (static_cast<double>(next) * step > budget) {
        throw Error(ErrorCode::RootScanExhausted, kModule,
                    "found " + std::to_string(count) + " of " + std::to_string(n) + " eigenvalues below omega = " +
                        std::to_string(budget));
      }
      std::vector<double> block(kBlock);
      parallel_for(kBlock, [&](std::size_t j) { block[j] = sigma(static_cast<double>(next + j) * step); });
      grid_sigma.insert(grid_sigma.end(), block.begin(), block.end());
      next += kBlock;
    }
    if (grid_sigma[k] <= grid_sigma[k - 1] && grid_sigma[k] < grid_sigma[k + 1]) {
      const double w = golden_min(sigma, static_cast<double>(k - 1) * step, static_cast<double>(k + 1) * step);
      if (!(roots.size() == 1 && roots.front().omega == 0.0 && w < 1e-6 * step)) try_root(w);
    }
    ++k;
  }

  // Two roots closer than the scan step can share one dip of sigma_min. The
  // exact eigenvalue count between checkpoints exposes such misses; those
  // intervals are resampled more finely until the counts agree.
  auto found_in = [&](double a, double b) {
    std::size_t c = 0;
    for (const Root& r : roots) c += (r.omega >= a && r.omega < b) ? r.functions.size() : 0;
    return c;
  };
  auto checkpoint = [&](double w) -> std::optional<std::size_t> {
    if (sigma(w) < 1e-6) return std::nullopt;
    return count_below(g, conds, w);
  };
  double last_w = static_cast<double>(k + 1) * step;
  std::optional<std::size_t> last_count = checkpoint(last_w);
  for (int tries = 1; !last_count; ++tries) {
    if (tries > 64) throw Error(ErrorCode::IllConditionedCluster, kModule, "no usable counting checkpoint");
    last_w += step / 7.0;
    last_count = checkpoint(last_w);
  }
  std::vector<std::pair<double, std::size_t>> checks{{0.0, 0}};
  for (std::size_t j = 1; static_cast<double>(j) * step < last_w; ++j) {
    if (grid_sigma[j] < 1e-6) continue;
    if (auto c = count_below(g, conds, static_cast<double>(j) * step)) checks.emplace_back(static_cast<double>(j) * step, *c);
  }
  checks.emplace_back(last_w, *last_count);
  for (std::size_t c = 1; c < checks.size(); ++c) {
    const auto [a, ca] = checks[c - 1];
    const auto [b, cb] = checks[c];
    const std::size_t expected = cb - std::min(ca, cb);
    for (std::size_t samples = 64; found_in(a, b) < expected; samples *= 8) {
      if (samples > 64 * 64) {
        throw Error(ErrorCode::IllConditionedCluster, kModule,
                    "could not resolve " + std::to_string(expected) + " eigenvalues with omega in [" +
                        std::to_string(a) + ", " + std::to_string(b) + ")");
      }
      const double h = (b - a) / static_cast<double>(samples);
      std::vector<double> sv(samples + 1);
      parallel_for(samples + 1, [&](std::size_t j) { sv[j] = sigma(a + static_cast<double>(j) * h); });
      for (std::size_t j = 1; j < samples; ++j) {
        if (sv[j] <= sv[j - 1] && sv[j] < sv[j + 1]) {
          try_root(golden_min(sigma, a + static_cast<double>(j - 1) * h, a + static_cast<double>(j + 1) * h));
        }
      }
    }
    if (found_in(a, b) > expected) {
      throw Error(ErrorCode::IllConditionedCluster, kModule,
                  "null-space dimensions disagree with the eigenvalue count for omega in [" + std::to_string(a) +
                      ", " + std::to_string(b) + ")");
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.omega < y.omega; });

  SpectralBasis basis;
  basis.path = SolverPath::Secular;
  basis.graph = g;
  basis.conditions = conds;
  basis.coefficients = CoefficientField::constant(g, kappa);
  basis.kappa = kappa;
  const double k2 = kappa * kappa;
  for (const auto& r : roots) {
    for (const auto& f : r.functions) {
      basis.eigenvalues.push_back(k2 + r.omega * r.omega);
      basis.modes.push_back(f);
      std::vector<EdgeEvaluator> evals;
      for (const auto& s : f) evals.emplace_back([s](double t, unsigned order) { return s.derivative(t, order); });
      basis.eigenfunctions.push_back(PiecewiseFunction::analytic(g, std::move(evals)));
    }
  }
  // Cluster ids: consecutive eigenvalues within cluster_tol * (1 + lambda).
  basis.cluster.assign(basis.size(), 0);
  for (std::size_t i = 1; i < basis.size(); ++i) {
    const double li = basis.eigenvalues[i];
    const bool same = li - basis.eigenvalues[i - 1] <= opt.cluster_tol * (1.0 + li);
    basis.cluster[i] = basis.cluster[i - 1] + (same ? 0 : 1);
  }
  basis.multiplicity.assign(basis.size(), 0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    basis.multiplicity[i] = static_cast<std::size_t>(std::count(basis.cluster.begin(), basis.cluster.end(), basis.cluster[i]));
  }
  // Clusters are sized before truncation, so a cut cluster still reports its
  // full multiplicity.
  basis.eigenvalues.resize(n);
  basis.modes.resize(n);
  basis.eigenfunctions.resize(n);
  basis.cluster.resize(n);
  basis.multiplicity.resize(n);
  return basis;
}

}  // namespace graphlaplace
