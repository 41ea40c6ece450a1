#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphlaplace/function_space.hpp"
#include "graphlaplace/spectral.hpp"

namespace graphlaplace {

/// Coefficients c_i = <u, phi_i> against a shared, immutable basis. Any
/// real sequence is allowed, so negative-order elements live here too.
struct SpectralCoefficients {
  std::shared_ptr<const SpectralBasis> basis;
  std::vector<double> c;

  std::size_t truncation() const noexcept { return c.size(); }
  static SpectralCoefficients unit(std::shared_ptr<const SpectralBasis> basis, std::size_t i);
  static SpectralCoefficients zero(std::shared_ptr<const SpectralBasis> basis);
};

/// Inner products against every phi_i. Panels scale with the highest
/// frequency in the basis so oscillatory modes are integrated accurately.
SpectralCoefficients project(const PiecewiseFunction& f, std::shared_ptr<const SpectralBasis> basis,
                             const QuadratureConfig& cfg = {});

/// Truncated norm plus an estimate of the neglected tail of the squared sum,
/// from a power-law fit of the terms over i in [N/2, N].
struct NormEstimate {
  double value = 0.0;
  double tail_sq = 0.0;         // estimated sum_{i > N} lambda_i^beta c_i^2 (inf when the fit says divergent)
  bool tail_divergent = false;  // fitted terms decay no faster than 1/i
  std::size_t truncation = 0;
};

/// (sum_i lambda_i^beta c_i^2)^{1/2}; negative beta allowed.
NormEstimate dot_h_norm(const SpectralCoefficients& c, double beta);

/// c_i -> lambda_i^{alpha/2} c_i (L^{alpha/2}).
SpectralCoefficients apply_fractional(const SpectralCoefficients& c, double alpha);

/// c_i -> lambda_i^{-alpha/2} c_i, alpha > 0.
SpectralCoefficients solve_fractional(const SpectralCoefficients& f, double alpha);

struct DerivativeEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // sum_{i>N} |c_i| C_j lambda_i^{j/2}, from fitted decay and the Weyl fit
  double decay_exponent = 0.0;  // r in |c_i| <~ i^{-r}
};

/// Truncated sum_i c_i D_eta^j phi_i(x). Throws InsufficientDecay unless the
/// coefficient envelope decays like i^{-r} with r > j + 1 (the series then
/// converges uniformly).
DerivativeEstimate spectral_derivative(const SpectralCoefficients& c, unsigned j, const GraphPoint& x,
                                       const Parameterization& eta = {});

/// x -> sum_i c_i phi_i(x): closed form on the secular path, nodal sums on FEM.
PiecewiseFunction synthesize(const SpectralCoefficients& c);

enum class SeriesBehaviour { Bounded, Divergent, Indeterminate };
enum class Verdict { Member, NotMember, Indeterminate };

std::string to_string(SeriesBehaviour b);
std::string to_string(Verdict v);

struct VertexDiagnostic {
  std::string check;     // "continuity", "dirichlet", "kirchhoff"
  std::string subject;   // "expansion" (L^m u from coefficients) or "source"
  unsigned image = 0;    // m in L^m u
  VertexId vertex = 0;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct RegularityReport {
  double alpha_target = 0.0;
  std::vector<double> partial_sums;  // ||u_N||^2_{alpha} for N = 1..truncation
  double term_decay = 0.0;           // s in lambda_i^alpha c_i^2 ~ i^{-s} over the tail
  SeriesBehaviour series = SeriesBehaviour::Indeterminate;
  unsigned kirchhoff_images = 0;     // floor(alpha/2 + 1/4)
  unsigned dirichlet_images = 0;     // floor(alpha/2 + 3/4)
  std::vector<VertexDiagnostic> vertex;
  bool diagnostics_pass = true;
  Verdict verdict = Verdict::Indeterminate;

  std::string to_text(const MetricGraph& g) const;
};

/// Membership diagnostics for dot-H^alpha: partial-sum behaviour plus the
/// vertex conditions carried by L^m u (continuity and Dirichlet values for
/// m < floor(alpha/2 + 3/4), flux balance for m < floor(alpha/2 + 1/4)).
/// A truncated expansion satisfies these term by term, so an optional source
/// function (the un-truncated u) is checked directly as well. Throws
/// ExceptionalOrder for alpha in {k + 1/2}.
RegularityReport regularity_report(const SpectralCoefficients& c, double alpha_target,
                                   const std::optional<PiecewiseFunction>& source = std::nullopt);

}  // namespace graphlaplace
