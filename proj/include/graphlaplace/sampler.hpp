#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "graphlaplace/fractional.hpp"
#include "graphlaplace/numerics.hpp"

namespace graphlaplace {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based stream: the seed is the Philox key, and (index, stream)
/// form the counter, so any draw is addressable without generating others.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Standard normal number `index` of this stream (Box-Muller on one block).
  double normal(std::uint64_t index) const;
  /// Uniform number `index` of this stream, in (0, 1).
  double uniform(std::uint64_t index) const;
};

/// xi_i iid N(0, 1), i < N: the coefficients of white noise.
SpectralCoefficients sample_white_noise(std::shared_ptr<const SpectralBasis> basis, const RngSpec& rng);

/// u = L^{-alpha/2} W truncated to the basis: c_i = lambda_i^{-alpha/2} xi_i.
struct FieldSample {
  SpectralCoefficients coeffs;
  RngSpec rng;
  double alpha = 0.0;
  /// alpha <= 1/2: sum lambda_i^{-alpha} diverges, so pointwise values are formal.
  bool formal = false;

  std::size_t truncation() const noexcept { return coeffs.truncation(); }
};

FieldSample sample_field(std::shared_ptr<const SpectralBasis> basis, double alpha, const RngSpec& rng);

/// `count` samples on streams first_stream, first_stream + 1, ...
std::vector<FieldSample> sample_fields(std::shared_ptr<const SpectralBasis> basis, double alpha, std::uint64_t seed,
                                       std::size_t count, std::uint64_t first_stream = 0);

struct CovarianceEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // C_sup^2 A^{-alpha} N^{1-2 alpha} / (2 alpha - 1)
};

/// sum_{i<=N} lambda_i^{-alpha} phi_i(x) phi_i(y). Throws InsufficientDecay
/// for alpha <= 1/2.
CovarianceEstimate covariance_series(const SpectralBasis& basis, double alpha, const GraphPoint& x,
                                     const GraphPoint& y);

struct EmpiricalCovariance {
  double covariance = 0.0;     // unbiased sample covariance
  double ci_half_width = 0.0;  // 99% normal approximation
  std::size_t samples = 0;
};

/// Needs at least 100 samples (TooFewSamples).
EmpiricalCovariance empirical_covariance(const std::vector<FieldSample>& samples, const GraphPoint& x,
                                         const GraphPoint& y);

/// E||u_N||^2_{dot H^s} = sum_{i<=N} lambda_i^{s - alpha} for N = 1..truncation.
struct NormCurve {
  std::vector<double> values;
  double term_decay = 0.0;  // q in lambda_i^{s-alpha} ~ i^{-q} over the tail
  LineFit log_fit;          // values vs log N for N >= 10
  SeriesBehaviour behaviour = SeriesBehaviour::Indeterminate;
  bool logarithmic = false;  // divergent with values ~ c log N
};

NormCurve expected_norm_curve(const SpectralBasis& basis, double alpha, double s);

/// Energy check for the alpha = 1 field: the conditional mean given u(x0) = z
/// has coefficients lambda_i^{-1} phi_i(x0) z / C(x0, x0); its energy
/// <L m, m> computed by quadrature of the bilinear form should equal
/// dot_h_norm(m, 1)^2.
struct EnergyCheck {
  double quadrature_energy = 0.0;
  double spectral_energy = 0.0;
  double relative_difference = 0.0;
};
EnergyCheck gff_energy_check(std::shared_ptr<const SpectralBasis> basis, const GraphPoint& x0, double z);

}  // namespace graphlaplace
