// P1 finite elements on metric graphs. Each edge gets a uniform mesh of
// ceil(l/h) elements; vertex nodes are shared across incident edges (so a
// loop's two ends map to one DOF), which is exactly H^1 conformity.
// Dirichlet vertices are eliminated, Kirchhoff is natural, and Robin adds
// w u(v) v(v) to the form.

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphlaplace/error.hpp"
#include "graphlaplace/numerics.hpp"
#include "graphlaplace/spectral.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "spectral";
constexpr long kEliminated = -1;

struct FemSystem {
  Eigen::SparseMatrix<double> A;   // a-weighted stiffness + kappa^2 mass + Robin
  Eigen::SparseMatrix<double> M;   // mass
  Eigen::SparseMatrix<double> K1;  // plain stiffness (for H^1 norms)
  std::vector<std::vector<long>> node_dof;  // per edge, per node
  std::size_t ndof = 0;
};

void check_operator(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds, double h) {
  conds.check_against(g);
  if (coeffs.kappa2.edge_count() != g.edge_count() || coeffs.a.edge_count() != g.edge_count()) {
    throw Error(ErrorCode::BadArgument, kModule, "coefficient field does not match the graph");
  }
  if (!(coeffs.a_min > 0.0)) throw Error(ErrorCode::NonPositiveCoefficient, kModule, "inf a must be positive");
  if (coeffs.kappa2_min < 0.0) throw Error(ErrorCode::NonPositiveCoefficient, kModule, "kappa^2 must be >= 0");
  if (coeffs.kappa2_min == 0.0 && !conds.has_dirichlet()) {
    throw Error(ErrorCode::NonPositiveOperator, kModule,
                "kappa^2 vanishes somewhere and there is no Dirichlet vertex; the operator may not be positive");
  }
  if (!(h > 0.0) || h > g.min_edge_length() / 4.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::MeshTooCoarse, kModule,
                "mesh size " + std::to_string(h) + " exceeds min edge length / 4 = " +
                    std::to_string(g.min_edge_length() / 4.0));
  }
}

std::size_t elements_on(double length, double h) {
  return static_cast<std::size_t>(std::ceil(length / h - 1e-9));
}

FemSystem assemble(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds, double h) {
  check_operator(g, coeffs, conds, h);
  FemSystem sys;
  std::vector<long> vdof(g.vertex_count(), kEliminated);
  long next = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!conds.is_dirichlet(v)) vdof[v] = next++;
  }
  sys.node_dof.resize(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const std::size_t ne = elements_on(g.edge(e).length, h);
    auto& nd = sys.node_dof[e];
    nd.resize(ne + 1);
    nd.front() = vdof[g.edge(e).tail];
    nd.back() = vdof[g.edge(e).head];
    for (std::size_t k = 1; k < ne; ++k) nd[k] = next++;
  }
  sys.ndof = static_cast<std::size_t>(next);

  const GaussRule& rule = gauss_legendre(4);
  std::vector<Eigen::Triplet<double>> tA, tM, tK;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& nd = sys.node_dof[e];
    const std::size_t ne = nd.size() - 1;
    const double he = g.edge(e).length / static_cast<double>(ne);
    for (std::size_t k = 0; k < ne; ++k) {
      const double t0 = he * static_cast<double>(k);
      double ka[2][2] = {}, mm[2][2] = {}, kk[2][2] = {};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double xi = 0.5 * (rule.nodes[q] + 1.0);
        const double w = 0.5 * he * rule.weights[q];
        const double t = t0 + he * xi;
        const double N[2] = {1.0 - xi, xi};
        const double dN[2] = {-1.0 / he, 1.0 / he};
        const double av = coeffs.a.value(e, t), k2 = coeffs.kappa2.value(e, t);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            ka[i][j] += w * (av * dN[i] * dN[j] + k2 * N[i] * N[j]);
            mm[i][j] += w * N[i] * N[j];
            kk[i][j] += w * dN[i] * dN[j];
          }
        }
      }
      const long d[2] = {nd[k], nd[k + 1]};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if (d[i] == kEliminated || d[j] == kEliminated) continue;
          tA.emplace_back(d[i], d[j], ka[i][j]);
          tM.emplace_back(d[i], d[j], mm[i][j]);
          tK.emplace_back(d[i], d[j], kk[i][j]);
        }
      }
    }
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const VertexCondition& c = conds.at(v);
    if (c.kind == VertexConditionKind::Robin) tA.emplace_back(vdof[v], vdof[v], c.weight);
  }
  const auto n = static_cast<Eigen::Index>(sys.ndof);
  sys.A.resize(n, n);
  sys.M.resize(n, n);
  sys.K1.resize(n, n);
  sys.A.setFromTriplets(tA.begin(), tA.end());
  sys.M.setFromTriplets(tM.begin(), tM.end());
  sys.K1.setFromTriplets(tK.begin(), tK.end());
  return sys;
}

std::vector<std::vector<double>> nodal_values(const FemSystem& sys, const Eigen::VectorXd& x) {
  std::vector<std::vector<double>> vals(sys.node_dof.size());
  for (std::size_t e = 0; e < sys.node_dof.size(); ++e) {
    for (long d : sys.node_dof[e]) vals[e].push_back(d == kEliminated ? 0.0 : x(d));
  }
  return vals;
}

}  // namespace

SpectralBasis fem_eigensolve(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds,
                             double h, std::size_t n) {
  const FemSystem sys = assemble(g, coeffs, conds, h);
  if (n == 0 || n > sys.ndof) {
    throw Error(ErrorCode::BadArgument, kModule,
                "requested " + std::to_string(n) + " eigenpairs from " + std::to_string(sys.ndof) + " DOFs");
  }
  const Eigen::MatrixXd A(sys.A), M(sys.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, kModule, "generalized eigensolver failed");

  SpectralBasis basis;
  basis.path = SolverPath::FEM;
  basis.graph = g;
  basis.conditions = conds;
  basis.coefficients = coeffs;
  basis.kappa = coeffs.constant_kappa.value_or(0.0);
  basis.mesh_size = h;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x = es.eigenvectors().col(static_cast<Eigen::Index>(i));
    auto vals = nodal_values(sys, x);
    double big = 0.0;
    for (const auto& ev : vals) {
      for (double v : ev) big = std::max(big, std::abs(v));
    }
    double sign = 1.0;
    for (const auto& ev : vals) {
      const auto it = std::find_if(ev.begin(), ev.end(), [&](double v) { return std::abs(v) > 1e-8 * big; });
      if (it != ev.end()) {
        sign = *it < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (auto& ev : vals) {
      for (double& v : ev) v *= sign;
    }
    basis.eigenvalues.push_back(es.eigenvalues()(static_cast<Eigen::Index>(i)));
    basis.eigenfunctions.push_back(PiecewiseFunction::sampled(g, std::move(vals)));
  }
  basis.cluster.assign(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const double li = basis.eigenvalues[i];
    basis.cluster[i] = basis.cluster[i - 1] + (li - basis.eigenvalues[i - 1] <= 1e-8 * (1.0 + li) ? 0 : 1);
  }
  basis.multiplicity.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    basis.multiplicity[i] = static_cast<std::size_t>(std::count(basis.cluster.begin(), basis.cluster.end(), basis.cluster[i]));
  }
  return basis;
}

FemSolution fem_solve(const MetricGraph& g, const CoefficientField& coeffs, const VertexConditionSet& conds,
                      const PiecewiseFunction& f, double h) {
  if (f.edge_count() != g.edge_count()) throw Error(ErrorCode::BadArgument, kModule, "right-hand side/graph mismatch");
  const FemSystem sys = assemble(g, coeffs, conds, h);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.ndof));
  const GaussRule& rule = gauss_legendre(6);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& nd = sys.node_dof[e];
    const std::size_t ne = nd.size() - 1;
    const double he = g.edge(e).length / static_cast<double>(ne);
    for (std::size_t k = 0; k < ne; ++k) {
      double loc[2] = {0.0, 0.0};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double xi = 0.5 * (rule.nodes[q] + 1.0);
        const double w = 0.5 * he * rule.weights[q] * f.value(e, he * (static_cast<double>(k) + xi));
        loc[0] += w * (1.0 - xi);
        loc[1] += w * xi;
      }
      if (nd[k] != kEliminated) b(nd[k]) += loc[0];
      if (nd[k + 1] != kEliminated) b(nd[k + 1]) += loc[1];
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.A);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, kModule, "factorization failed");
  const Eigen::VectorXd u = solver.solve(b);
  if (solver.info() != Eigen::Success || !u.allFinite()) {
    throw Error(ErrorCode::SingularSystem, kModule, "solve failed");
  }
  FemSolution out;
  out.u = PiecewiseFunction::sampled(g, nodal_values(sys, u));
  out.h1_norm = std::sqrt(u.dot(sys.M * u) + u.dot(sys.K1 * u));
  out.rhs_l2_norm = lp_norm(f, 2.0);
  return out;
}

}  // namespace graphlaplace
