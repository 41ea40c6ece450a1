#pragma once

#include <optional>
#include <vector>

#include "graphlaplace/function_space.hpp"
#include "graphlaplace/metric_graph.hpp"
#include "graphlaplace/vertex_conditions.hpp"

namespace graphlaplace {

/// Variable coefficients for kappa^2 - (a u')'. Minima are sampled on a fine
/// grid; kappa^2 may vanish only if the conditions include a Dirichlet vertex.
struct CoefficientField {
  PiecewiseFunction kappa2;
  PiecewiseFunction a;
  bool lipschitz = false;
  double kappa2_min = 0.0;
  double a_min = 0.0;
  double a_lipschitz = 0.0;  // estimated when `lipschitz` is set

  static CoefficientField constant(const MetricGraph& g, double kappa, double a = 1.0);
  /// Throws NonPositiveCoefficient if inf a <= 0 or kappa^2 < 0 somewhere.
  static CoefficientField make(const MetricGraph& g, PiecewiseFunction kappa2, PiecewiseFunction a,
                               bool lipschitz = false);

  bool is_constant() const { return constant_kappa.has_value() && constant_a.has_value(); }
  std::optional<double> constant_kappa;  // set by constant()
  std::optional<double> constant_a;
};

/// phi|_e(t) = a cos(omega t) + b sin(omega t), or a + b t when omega = 0.
struct Sinusoid {
  double a = 0.0;
  double b = 0.0;
  double omega = 0.0;

  double derivative(double t, unsigned order) const;
  /// Exact max over [0, l] of |order-th derivative|.
  double sup(double length, unsigned order = 0) const;
};

enum class SolverPath { Secular, FEM };

/// Eigenpairs in nondecreasing order, L2-orthonormal, sign-fixed so the
/// first clearly nonzero coefficient (edge order) is positive.
class SpectralBasis {
 public:
  SolverPath path = SolverPath::Secular;
  MetricGraph graph;
  VertexConditionSet conditions;
  CoefficientField coefficients;
  double kappa = 0.0;       // secular path (constant coefficients)
  double mesh_size = 0.0;   // FEM path
  std::vector<double> eigenvalues;
  std::vector<PiecewiseFunction> eigenfunctions;
  std::vector<std::vector<Sinusoid>> modes;  // secular path only, per edge
  std::vector<std::size_t> cluster;          // cluster id (0-based) per eigenvalue
  std::vector<std::size_t> multiplicity;     // size of that cluster

  std::size_t size() const noexcept { return eigenvalues.size(); }
  double lambda(std::size_t i) const { return eigenvalues.at(i); }
  /// lambda_i - kappa^2 for constant coefficients.
  double lambda_hat(std::size_t i) const;
  const PiecewiseFunction& phi(std::size_t i) const { return eigenfunctions.at(i); }

  /// D_eta^j phi_i at x (closed form on the secular path).
  double derivative(std::size_t i, const GraphPoint& x, unsigned order, const Parameterization& eta = {}) const;
  /// sup over the graph of |D^j phi_i|: exact on the secular path, nodal max on FEM.
  double sup_norm(std::size_t i, unsigned order = 0) const;
};

struct SecularOptions {
  double scan_step = 0.0;        // 0: pi / (8 * total length)
  double null_threshold = 1e-9;  // relative to sigma_max
  double cluster_tol = 1e-8;     // eigenvalues within tol * (1 + lambda) are merged
  double omega_budget = 0.0;     // 0: derived from Weyl counting
};

/// Exact eigenpairs of kappa^2 - Laplacian via the secular matrix M(omega)
/// (sinusoidal ansatz per edge, one row per direction slot).
SpectralBasis secular_eigensolve(const MetricGraph& g, double kappa, const VertexConditionSet& conds, std::size_t n,
                                 const SecularOptions& opt = {});

/// Smallest singular value of the secular matrix, exposed for diagnostics.
double secular_sigma_min(const MetricGraph& g, const VertexConditionSet& conds, double omega);

/// P1 finite elements on uniform per-edge meshes with shared vertex DOFs.
SpectralBasis fem_eigensolve(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds,
                             double h, std::size_t n);

/// max over probe points of |kappa^2 phi - (a phi')' - lambda phi| plus the
/// vertex-condition residuals. `lambda_override` replaces lambda_i.
double eig_residual(const SpectralBasis& basis, std::size_t i, std::size_t probes_per_edge = 64,
                    std::optional<double> lambda_override = std::nullopt);

/// Largest vertex-condition residual of phi_i (Kirchhoff/Robin flux balance).
double kirchhoff_residual_max(const SpectralBasis& basis, std::size_t i);

struct WeylFit {
  double A = 0.0;  // min lambda_i / i^2
  double B = 0.0;  // max lambda_i / i^2
  std::vector<double> ratios;
};
WeylFit weyl_fit(const SpectralBasis& basis);

struct Survey {
  double constant = 0.0;
  std::vector<double> per_mode;
};

/// max_i sup|phi_i| together with the per-mode values.
Survey sup_norm_survey(const SpectralBasis& basis);

/// max_i sup|D^j phi_i| / lambda_i^{j/2}.
Survey derivative_bound_survey(const SpectralBasis& basis, unsigned j);

struct FemSolution {
  PiecewiseFunction u;
  double h1_norm = 0.0;
  double rhs_l2_norm = 0.0;
};

/// Galerkin solution of <L u, v> = <f, v> on the P1 space of mesh size h.
FemSolution fem_solve(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds,
                      const PiecewiseFunction& f, double h);

/// FEM eigenvalues at h and h/2 against the secular values, with the
/// Richardson-extrapolated estimate (4 lambda_{h/2} - lambda_h) / 3 and the
/// observed order log2(err_h / err_{h/2}) per mode.
struct FemCrossCheck {
  std::vector<double> secular, fem_h, fem_half, extrapolated, observed_order;
  double max_rel_error_half = 0.0;
  double max_rel_error_extrapolated = 0.0;
  double mean_order = 0.0;
};
FemCrossCheck fem_cross_check(const MetricGraph& g, double kappa, const VertexConditionSet& conds, double h,
                              std::size_t n);

}  // namespace graphlaplace
