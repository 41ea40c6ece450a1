#include "graphlaplace/sampler.hpp"

#include <cmath>
#include <numbers>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

namespace {

constexpr const char* kModule = "sampler";
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

std::vector<double> mode_values(const SpectralBasis& b, const GraphPoint& x) {
  b.graph.check_point(x);
  std::vector<double> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = b.phi(i).value(x.edge, x.t);
  return v;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = M0 * ctr[0], p1 = M1 * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

double RngSpec::normal(std::uint64_t index) const {
  const auto r = philox4x32_10({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                               {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  // Open-interval uniforms on the 2^-53 lattice.
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngSpec::uniform(std::uint64_t index) const {
  const auto r = philox4x32_10({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                               {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  return (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
}

SpectralCoefficients sample_white_noise(std::shared_ptr<const SpectralBasis> basis, const RngSpec& rng) {
  SpectralCoefficients c = SpectralCoefficients::zero(std::move(basis));
  for (std::size_t i = 0; i < c.c.size(); ++i) c.c[i] = rng.normal(i);
  return c;
}

FieldSample sample_field(std::shared_ptr<const SpectralBasis> basis, double alpha, const RngSpec& rng) {
  if (!std::isfinite(alpha) || alpha < 0.0) throw Error(ErrorCode::BadArgument, kModule, "alpha must be >= 0");
  FieldSample s;
  s.coeffs = sample_white_noise(std::move(basis), rng);
  for (std::size_t i = 0; i < s.coeffs.c.size(); ++i) s.coeffs.c[i] *= std::pow(s.coeffs.basis->lambda(i), -alpha / 2.0);
  s.rng = rng;
  s.alpha = alpha;
  s.formal = alpha <= 0.5;
  return s;
}

std::vector<FieldSample> sample_fields(std::shared_ptr<const SpectralBasis> basis, double alpha, std::uint64_t seed,
                                       std::size_t count, std::uint64_t first_stream) {
  std::vector<FieldSample> out(count);
  parallel_for(count, [&](std::size_t k) { out[k] = sample_field(basis, alpha, RngSpec{seed, first_stream + k}); });
  return out;
}

CovarianceEstimate covariance_series(const SpectralBasis& basis, double alpha, const GraphPoint& x,
                                     const GraphPoint& y) {
  if (!(alpha > 0.5)) {
    throw Error(ErrorCode::InsufficientDecay, kModule,
                "sum lambda_i^-alpha diverges for alpha <= 1/2; the pointwise covariance does not exist");
  }
  const auto px = mode_values(basis, x), py = mode_values(basis, y);
  std::vector<double> terms(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) terms[i] = std::pow(basis.lambda(i), -alpha) * px[i] * py[i];
  CovarianceEstimate out;
  out.value = pairwise_sum(terms);
  const double N = static_cast<double>(basis.size());
  const double A = basis.size() >= 10 ? weyl_fit(basis).A : basis.lambda(0);
  const double csup = sup_norm_survey(basis).constant;
  out.tail_bound = csup * csup * std::pow(A, -alpha) * std::pow(N, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
  return out;
}

EmpiricalCovariance empirical_covariance(const std::vector<FieldSample>& samples, const GraphPoint& x,
                                         const GraphPoint& y) {
  if (samples.size() < 100) {
    throw Error(ErrorCode::TooFewSamples, kModule,
                "need at least 100 samples, got " + std::to_string(samples.size()));
  }
  const SpectralBasis& b = *samples.front().coeffs.basis;
  const auto px = mode_values(b, x), py = mode_values(b, y);
  const std::size_t n = samples.size();
  std::vector<double> ux(n), uy(n);
  parallel_for(n, [&](std::size_t k) {
    const auto& c = samples[k].coeffs.c;
    std::vector<double> tx(c.size()), ty(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      tx[i] = c[i] * px[i];
      ty[i] = c[i] * py[i];
    }
    ux[k] = pairwise_sum(tx);
    uy[k] = pairwise_sum(ty);
  });
  const double mx = pairwise_sum(ux) / static_cast<double>(n);
  const double my = pairwise_sum(uy) / static_cast<double>(n);
  std::vector<double> prod(n);
  for (std::size_t k = 0; k < n; ++k) prod[k] = (ux[k] - mx) * (uy[k] - my);
  const double mean_prod = pairwise_sum(prod) / static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t k = 0; k < n; ++k) dev[k] = (prod[k] - mean_prod) * (prod[k] - mean_prod);
  const double var = pairwise_sum(dev) / static_cast<double>(n - 1);
  EmpiricalCovariance out;
  out.samples = n;
  out.covariance = mean_prod * static_cast<double>(n) / static_cast<double>(n - 1);
  out.ci_half_width = kZ99 * std::sqrt(var / static_cast<double>(n));
  return out;
}

NormCurve expected_norm_curve(const SpectralBasis& basis, double alpha, double s) {
  NormCurve c;
  std::vector<double> terms(basis.size());
  double run = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    terms[i] = std::pow(basis.lambda(i), s - alpha);
    run += terms[i];
    c.values.push_back(run);
  }
  const std::size_t n = terms.size();
  if (n >= 8) {
    std::vector<double> lx, ly;
    for (std::size_t i = n / 2; i < n; ++i) {
      lx.push_back(std::log(static_cast<double>(i + 1)));
      ly.push_back(std::log(terms[i]));
    }
    c.term_decay = -fit_line(lx, ly).slope;
  }
  if (n >= 20) {
    std::vector<double> lx, vy;
    for (std::size_t k = 9; k < n; ++k) {
      lx.push_back(std::log(static_cast<double>(k + 1)));
      vy.push_back(c.values[k]);
    }
    c.log_fit = fit_line(lx, vy);
  }
  if (c.term_decay > 1.1) {
    c.behaviour = SeriesBehaviour::Bounded;
  } else if (c.term_decay < 0.9) {
    c.behaviour = SeriesBehaviour::Divergent;
  } else if (c.log_fit.r_squared > 0.99 && c.log_fit.slope > 0.0) {
    c.behaviour = SeriesBehaviour::Divergent;
    c.logarithmic = true;
  }
  return c;
}

EnergyCheck gff_energy_check(std::shared_ptr<const SpectralBasis> basis, const GraphPoint& x0, double z) {
  const SpectralBasis& b = *basis;
  const auto p = mode_values(b, x0);
  const double cxx = covariance_series(b, 1.0, x0, x0).value;
  SpectralCoefficients m = SpectralCoefficients::zero(basis);
  for (std::size_t i = 0; i < b.size(); ++i) m.c[i] = p[i] * z / (b.lambda(i) * cxx);
  const PiecewiseFunction u = synthesize(m);

  QuadratureConfig cfg;
  const double omega_max = std::sqrt(std::max(0.0, b.eigenvalues.back() - b.coefficients.kappa2_min));
  cfg.panels = static_cast<std::size_t>(std::ceil(2.0 * omega_max * b.graph.max_edge_length() / std::numbers::pi)) + 8;
  const CoefficientField& k = b.coefficients;
  double energy = integrate(
      u,
      [&](EdgeId e, double t) {
        const double d = u.derivative(e, t, 1), v = u.value(e, t);
        return k.a.value(e, t) * d * d + k.kappa2.value(e, t) * v * v;
      },
      cfg);
  for (VertexId v = 0; v < b.graph.vertex_count(); ++v) {
    const VertexCondition& c = b.conditions.at(v);
    if (c.kind != VertexConditionKind::Robin) continue;
    const double uv = evaluate(b.graph, u, b.graph.vertex_point(v));
    energy += c.weight * uv * uv;
  }
  EnergyCheck out;
  out.quadrature_energy = energy;
  const double h = dot_h_norm(m, 1.0).value;
  out.spectral_energy = h * h;
  out.relative_difference = std::abs(energy - out.spectral_energy) / out.spectral_energy;
  return out;
}

}  // namespace graphlaplace
