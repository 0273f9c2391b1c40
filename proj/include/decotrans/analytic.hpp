#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "decotrans/log_real.hpp"
#include "decotrans/model.hpp"

namespace decotrans {

struct InternalConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Second-order generalized Lyapunov exponent
/// xi^-1 = log(sigma^2/2 + sqrt(sigma^4/4 + 1)).
inline double xi_inverse(double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("xi_inverse: sigma must be >= 0");
  double s2 = sigma * sigma;
  return std::log(s2 / 2.0 + std::sqrt(s2 * s2 / 4.0 + 1.0));
}

/// Weights of the growing/oscillating exponentials, 2 alpha_pm = 1 +- sech(1/xi).
inline std::pair<double, double> alpha_pm(double xi_inv) {
  if (xi_inv < 0.0) throw std::invalid_argument("alpha_pm: xi_inv must be >= 0");
  double sech = 1.0 / std::cosh(xi_inv);
  return {(1.0 + sech) / 2.0, (1.0 - sech) / 2.0};
}

/// Disorder-averaged two-terminal resistance of a coherent chain at the band
/// center with wide-band ends:
///   <1/T_N> = (1 + a+ e^{N/xi} + a- e^{-N/xi} (-1)^N) / 2.
inline LogReal avg_resistance_band_center(long n, double sigma) {
  if (n < 1) throw std::invalid_argument("avg_resistance_band_center: N must be >= 1");
  if (sigma == 0.0) return LogReal::from_value(1.0);
  double xinv = xi_inverse(sigma);
  auto [ap, am] = alpha_pm(xinv);
  double l = static_cast<double>(n) * xinv;
  if (l < 600.0) {
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return LogReal::from_value(0.5 * (1.0 + ap * std::exp(l) + am * std::exp(-l) * sign));
  }
  // Constant and suppressed terms are below double precision here.
  return LogReal::from_log(std::log(ap / 2.0) + l);
}

/// Disorder-averaged polynomial moments R_N = <r_N^2>, S_N = <r_N r_{N-1}>,
/// U_N = <r_N s_{N-1}>, by the coupled recursions
///   R_N = (E^2 + s^2) R_{N-1} - 2E S_{N-1} + R_{N-2}
///   S_N = E R_{N-1} - S_{N-1}
///   U_N = E S_{N-1} - U_{N-1} - 1
/// with R_0 = 1, R_{-1} = S_0 = U_1 = 0. Entry i holds subscript i; the true
/// value is x[i] * 2^exp2[i] (shared power-of-two rescaling against overflow).
struct MomentSequences {
  std::vector<double> r, s, u;
  std::vector<long> exp2;
};

inline MomentSequences moment_recursion(int n, double energy, double sigma) {
  if (n < 1) throw std::invalid_argument("moment_recursion: N must be >= 1");
  MomentSequences seq;
  seq.r.resize(n + 1);
  seq.s.resize(n + 1);
  seq.u.resize(n + 1);
  seq.exp2.resize(n + 1, 0);

  const double c = energy * energy + sigma * sigma;
  double r_m2 = 0.0, r_m1 = 1.0;  // R_{-1}, R_0
  double s_m1 = 0.0;              // S_0
  double u_m1 = -1.0;             // U_0 := -1 makes U_1 = E S_0 - U_0 - 1 = 0
  double one = 1.0;               // the recursion's unit, under the same rescaling
  long exp2 = 0;
  constexpr double kLimit = 1.3407807929942597e154;  // 2^512
  constexpr double kScale = 7.458340731200207e-155;  // 2^-512

  seq.r[0] = 1.0;
  seq.s[0] = 0.0;
  seq.u[0] = -1.0;

  for (int i = 1; i <= n; ++i) {
    double r_i = c * r_m1 - 2.0 * energy * s_m1 + r_m2;
    double s_i = energy * r_m1 - s_m1;
    double u_i = energy * s_m1 - u_m1 - one;
    r_m2 = r_m1;
    r_m1 = r_i;
    s_m1 = s_i;
    u_m1 = u_i;
    if (std::abs(r_i) > kLimit) {
      r_m2 *= kScale;
      r_m1 *= kScale;
      s_m1 *= kScale;
      u_m1 *= kScale;
      one *= kScale;
      exp2 += 512;
    }
    seq.r[i] = r_m1;
    seq.s[i] = s_m1;
    seq.u[i] = u_m1;
    seq.exp2[i] = exp2;
  }
  return seq;
}

/// Roots z_k of N1(z) = z^3 - (E^2-s^2-1) z^2 + (E^2+s^2-1) z - 1, with the
/// partial-fraction weights for wide-band contacts, the cubic discriminant
/// and a repeated-root flag. z1 is the real root in (0,1) that dominates the
/// resistance; for the discriminant < 0 case z3 = conj(z2).
struct CubicRootSet {
  std::complex<double> z1, z2, z3;
  std::complex<double> alpha1, alpha2, alpha3;
  double discriminant = 0.0;
  bool degenerate = false;
};

namespace detail {

inline std::array<std::complex<double>, 3> solve_n1_cubic(double energy, double sigma) {
  const double e2 = energy * energy, s2 = sigma * sigma;
  const double a2 = -(e2 - s2 - 1.0);  // z^3 + a2 z^2 + a1 z + a0
  const double a1 = e2 + s2 - 1.0;
  const double a0 = -1.0;

  // Depressed cubic y^3 + p y + q, z = y - a2/3.
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;

  std::array<std::complex<double>, 3> roots;
  if (disc > 0.0) {
    // Three real roots, trigonometric form.
    double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots[k] = m * std::cos(theta - 2.0 * M_PI * k / 3.0) - a2 / 3.0;
  } else {
    // One real root (hyperbolic form), then the complex pair from the
    // deflated quadratic using z1 z2 z3 = -a0.
    double y;
    if (p < 0.0) {
      double m = 2.0 * std::sqrt(-p / 3.0);
      double arg = -3.0 * std::abs(q) / (p * m);
      y = -std::copysign(m, q) * std::cosh(std::acosh(std::max(arg, 1.0)) / 3.0);
    } else if (p > 0.0) {
      double m = 2.0 * std::sqrt(p / 3.0);
      y = -m * std::sinh(std::asinh(3.0 * q / (p * m)) / 3.0);
    } else {
      y = -std::cbrt(q);
    }
    double zr = y - a2 / 3.0;
    double b = a2 + zr;
    double cc = -a0 / zr;
    std::complex<double> rad = std::sqrt(std::complex<double>(b * b - 4.0 * cc, 0.0));
    roots[0] = zr;
    roots[1] = (-b + rad) / 2.0;
    roots[2] = (-b - rad) / 2.0;
  }

  // One Newton polish per root on the original cubic.
  for (auto& z : roots) {
    std::complex<double> f = ((z + a2) * z + a1) * z + a0;
    std::complex<double> df = (3.0 * z + 2.0 * a2) * z + a1;
    if (std::abs(df) > 1e-12) z -= f / df;
  }
  return roots;
}

/// Numerator A(z) of the generating-function remainder for self-energy
/// Gamma = nu + i eta.
inline std::complex<double> gf_numerator(std::complex<double> z, double energy, double sigma,
                                         std::complex<double> gamma) {
  const double e2 = energy * energy, s2 = sigma * sigma;
  const double nu = gamma.real();
  const double g2 = std::norm(gamma);
  const double g4 = g2 * g2;
  const double c2 = 1.0 - 2.0 * nu * nu + g4;
  const double c1 =
      1.0 + (2.0 * nu * nu - 1.0) * (e2 - s2) + 2.0 * g2 * (1.0 - 2.0 * nu * energy) + g4;
  const double c0 = e2 + s2 + 2.0 * g2 - 4.0 * nu * energy + 2.0 * nu * nu;
  return (c2 * z + c1) * z + c0;
}

inline std::complex<double> n1_derivative(std::complex<double> z, double energy, double sigma) {
  const double e2 = energy * energy, s2 = sigma * sigma;
  return 3.0 * z * z - 2.0 * (e2 - s2 - 1.0) * z + (e2 + s2 - 1.0);
}

}  // namespace detail

/// Partial-fraction weights alpha_k = A(z_k) / N1'(z_k) for a given contact
/// self-energy. Requires simple roots.
inline std::array<std::complex<double>, 3> partial_fraction_weights(const CubicRootSet& roots,
                                                                    double energy, double sigma,
                                                                    std::complex<double> gamma) {
  if (roots.degenerate)
    throw InternalConsistencyError("partial_fraction_weights: repeated roots, weights undefined");
  std::array<std::complex<double>, 3> zs{roots.z1, roots.z2, roots.z3};
  std::array<std::complex<double>, 3> out;
  for (int k = 0; k < 3; ++k)
    out[k] = detail::gf_numerator(zs[k], energy, sigma, gamma) /
             detail::n1_derivative(zs[k], energy, sigma);
  return out;
}

inline CubicRootSet cubic_roots(double energy, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("cubic_roots: sigma must be >= 0");
  auto roots = detail::solve_n1_cubic(energy, sigma);

  CubicRootSet out;
  const double e2 = energy * energy, s2 = sigma * sigma;
  const double e4 = e2 * e2, s4 = s2 * s2;
  out.discriminant =
      s4 * s4 - 2.0 * s4 * (e4 + 10.0 * e2 - 2.0) + e2 * std::pow(e2 - 4.0, 3);

  double min_gap = std::abs(roots[0] - roots[1]);
  min_gap = std::min(min_gap, std::abs(roots[0] - roots[2]));
  min_gap = std::min(min_gap, std::abs(roots[1] - roots[2]));
  out.degenerate = min_gap < 1e-8;

  // z1: the real root in (0,1); for sigma -> 0 it degenerates to 1.
  constexpr double kRealTol = 1e-9;
  int i1 = -1;
  double best = 1e300;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(roots[k].imag()) < kRealTol) {
      double x = roots[k].real();
      double dist = (x > 0.0 && x < 1.0) ? 0.0 : std::abs(x - 1.0);
      if (dist < best) {
        best = dist;
        i1 = k;
      }
    }
  }
  if (i1 < 0) throw InternalConsistencyError("cubic_roots: no real root found");
  out.z1 = roots[i1].real();
  std::array<std::complex<double>, 2> rest;
  int j = 0;
  for (int k = 0; k < 3; ++k)
    if (k != i1) rest[j++] = roots[k];
  if (std::abs(rest[0].imag()) < kRealTol && std::abs(rest[1].imag()) < kRealTol) {
    // Both real: order by real part (E=0 convention z2 = -s^2/2 - sqrt(..), z3 = -1).
    if (rest[0].real() > rest[1].real()) std::swap(rest[0], rest[1]);
    out.z2 = rest[0].real();
    out.z3 = rest[1].real();
  } else {
    // Conjugate pair: z2 carries the positive imaginary part.
    if (rest[0].imag() < 0.0) std::swap(rest[0], rest[1]);
    out.z2 = rest[0];
    out.z3 = rest[1];
  }

  if (!out.degenerate) {
    auto alphas = partial_fraction_weights(out, energy, sigma, std::complex<double>(0.0, -1.0));
    out.alpha1 = alphas[0];
    out.alpha2 = alphas[1];
    out.alpha3 = alphas[2];
  }
  return out;
}

/// |log z1|: the N -> infinity growth rate of <1/T_N>; equals xi_inverse at E=0.
inline double dominant_growth_rate(double energy, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("dominant_growth_rate: sigma must be > 0");
  auto roots = cubic_roots(energy, sigma);
  return std::abs(std::log(roots.z1.real()));
}

namespace detail {

/// <1/T_N> assembled from the polynomial moment recursion, log-domain.
inline LogReal avg_resistance_recursion(int n, double energy, double sigma,
                                        std::complex<double> gamma) {
  const double nu = gamma.real();
  const double eta = gamma.imag();
  const double g2 = std::norm(gamma);
  const double g4 = g2 * g2;
  const double c = energy * energy + sigma * sigma;

  double r_m2 = 0.0, r_m1 = 1.0, s_m1 = 0.0, u_m1 = -1.0, one = 1.0;
  double r_m3 = 0.0;  // R_{N-2} at loop end needs three trailing values
  long exp2 = 0;
  constexpr double kLimit = 1.3407807929942597e154;
  constexpr double kScale = 7.458340731200207e-155;

  for (int i = 1; i <= n; ++i) {
    double r_i = c * r_m1 - 2.0 * energy * s_m1 + r_m2;
    double s_i = energy * r_m1 - s_m1;
    double u_i = energy * s_m1 - u_m1 - one;
    r_m3 = r_m2;
    r_m2 = r_m1;
    r_m1 = r_i;
    s_m1 = s_i;
    u_m1 = u_i;
    if (std::abs(r_i) > kLimit) {
      r_m3 *= kScale;
      r_m2 *= kScale;
      r_m1 *= kScale;
      s_m1 *= kScale;
      u_m1 *= kScale;
      one *= kScale;
      exp2 += 512;
    }
  }
  // Recover S_{N-1} from S_N = E R_{N-1} - S_{N-1}.
  double s_n = s_m1;
  double s_nm1 = energy * r_m2 - s_n;
  double val = r_m1 + 2.0 * g2 * r_m2 + g4 * r_m3 - 4.0 * nu * s_n - 4.0 * nu * g2 * s_nm1 +
               4.0 * nu * nu * u_m1 + 2.0 * g2 * one;
  return LogReal::from_log(std::log(val / (4.0 * eta * eta)) +
                           static_cast<double>(exp2) * std::log(2.0));
}

/// <1/T_N> from the root form <1/T_N> = 1/2 + (1/4 eta^2) sum_k alpha_k z_k^-N.
inline LogReal avg_resistance_roots(int n, double energy, double sigma,
                                    std::complex<double> gamma, const CubicRootSet& roots) {
  const double eta = gamma.imag();
  auto alphas = partial_fraction_weights(roots, energy, sigma, gamma);
  std::array<std::complex<double>, 3> zs{roots.z1, roots.z2, roots.z3};
  std::array<std::complex<double>, 3> lk;
  double m = -1e300;
  for (int k = 0; k < 3; ++k) {
    lk[k] = -static_cast<double>(n) * std::log(zs[k]);
    if (std::abs(alphas[k]) > 1e-300) m = std::max(m, lk[k].real());
  }
  m = std::max(m, 0.0);
  std::complex<double> scaled{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(alphas[k]) <= 1e-300) continue;
    scaled += alphas[k] * std::exp(lk[k] - m);
  }
  double v = 0.5 * std::exp(-m) + scaled.real() / (4.0 * eta * eta);
  return LogReal::from_log(m + std::log(v));
}

}  // namespace detail

/// Disorder-averaged resistance for arbitrary energy and contact self-energy.
/// Computes both the recursion form and the root form and cross-checks them;
/// falls back to the recursion alone when the cubic is degenerate (sigma -> 0).
inline LogReal avg_resistance_general(int n, double energy, double sigma,
                                      std::complex<double> gamma) {
  if (n < 1) throw std::invalid_argument("avg_resistance_general: N must be >= 1");
  if (gamma.imag() == 0.0)
    throw std::invalid_argument("avg_resistance_general: eta must be nonzero");
  LogReal rec = detail::avg_resistance_recursion(n, energy, sigma, gamma);
  CubicRootSet roots = cubic_roots(energy, sigma);
  if (roots.degenerate) return rec;
  LogReal root_form = detail::avg_resistance_roots(n, energy, sigma, gamma, roots);
  if (std::abs(rec.log() - root_form.log()) > 1e-8)
    throw InternalConsistencyError("avg_resistance_general: recursion and root forms disagree");
  return root_form;
}

/// Expected number u_j of coherent subsystems of length j under random
/// uncorrelated decoherence: u_j = (1-p)^{j-1} [2p + (N-1-j) p^2] for j < N,
/// u_N = (1-p)^{N-1}.
struct SubsystemCensus {
  int n = 0;
  double p = 0.0;
  std::vector<double> u;  // u[j-1] is the count for length j
};

inline SubsystemCensus subsystem_counts(int n, double p) {
  if (n < 1) throw std::invalid_argument("subsystem_counts: N must be >= 1");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("subsystem_counts: p must be in [0,1]");
  SubsystemCensus census;
  census.n = n;
  census.p = p;
  census.u.resize(n);
  for (int j = 1; j < n; ++j)
    census.u[j - 1] =
        std::pow(1.0 - p, j - 1) * (2.0 * p + static_cast<double>(n - 1 - j) * p * p);
  census.u[n - 1] = std::pow(1.0 - p, n - 1);
  return census;
}

/// Critical degree of decoherence p* = 1 - e^{-1/xi} separating Ohmic from
/// localized behavior.
inline double critical_decoherence(double sigma) {
  return -std::expm1(-xi_inverse(sigma));
}

/// Inverse mean subsystem length 1/l = -log(1-p).
inline double ell_inverse(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("ell_inverse: p must be in [0,1]");
  return -std::log1p(-p);
}

/// Resistivity of the infinite chain under random uncorrelated decoherence.
/// Ohmic branch (p > p*): closed form. Localized branch
/// (p <= p*): tagged result carrying the growth exponent 1/xi - 1/l; the
/// divergence is physics, not an error.
struct Resistivity {
  bool ohmic = false;
  double value = 0.0;        // Ohmic branch only
  double growth_rate = 0.0;  // localized branch: 1/xi - 1/l per site
};

inline Resistivity resistivity_random(double p, double sigma) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("resistivity_random: p must be in [0,1]");
  Resistivity out;
  double xinv = xi_inverse(sigma);
  double linv = p < 1.0 ? ell_inverse(p) : std::numeric_limits<double>::infinity();
  out.growth_rate = xinv - linv;
  out.ohmic = p > critical_decoherence(sigma);
  if (out.ohmic) {
    double s2 = sigma * sigma;
    out.value = p + (s2 / 4.0) * p / (p - s2 * (1.0 - p) / (2.0 - p));
  }
  return out;
}

/// Geometric-series form of the Ohmic resistivity; algebraically
/// identical to the closed form and kept as an independent route for
/// cross-checks.
inline double resistivity_random_series(double p, double sigma) {
  if (p <= 0.0 || p > 1.0)
    throw std::invalid_argument("resistivity_random_series: p must be in (0,1]");
  double xinv = xi_inverse(sigma);
  auto [ap, am] = alpha_pm(xinv);
  double q = 1.0 - p;  // e^{-1/l}
  double ex = std::exp(xinv);
  if (ex * q >= 1.0)
    throw std::domain_error("resistivity_random_series: series diverges (localized)");
  return (p * p / 2.0) *
         (1.0 / (1.0 - q) + ap * ex / (1.0 - ex * q) - am / ex / (1.0 + q / ex));
}

/// Homogeneous decoherence: rho_hom = <1/T_{l_phi}> / l_phi. Non-integer
/// l_phi mixes <1/T> at the two neighboring integer lengths linearly by the
/// fractional part, then divides by the real l_phi.
inline LogReal resistivity_homogeneous(double ell_phi, double sigma) {
  if (ell_phi < 1.0)
    throw std::invalid_argument("resistivity_homogeneous: ell_phi must be >= 1");
  long lo = static_cast<long>(std::floor(ell_phi));
  long hi = static_cast<long>(std::ceil(ell_phi));
  double frac = ell_phi - static_cast<double>(lo);
  LogReal avg = avg_resistance_band_center(lo, sigma);
  if (hi != lo && frac > 0.0) {
    LogReal a = LogReal::from_log(avg.log() + std::log1p(-frac));
    LogReal b = LogReal::from_log(avg_resistance_band_center(hi, sigma).log() + std::log(frac));
    avg = a + b;
  }
  return LogReal::from_log(avg.log() - std::log(ell_phi));
}

/// Exact finite-N resistivity under random uncorrelated decoherence with the
/// analytic disorder average: rho(N) = (1/N) sum_j u_j <1/T_j>  (log-domain;
/// this is the deterministic decoherence average over the subsystem census).
inline LogReal census_resistivity(int n, double p, double sigma) {
  SubsystemCensus census = subsystem_counts(n, p);
  LogReal total;
  for (int j = 1; j <= n; ++j) {
    double uj = census.u[j - 1];
    if (uj <= 0.0) continue;
    total += LogReal::from_log(std::log(uj) + avg_resistance_band_center(j, sigma).log());
  }
  return LogReal::from_log(total.log() - std::log(static_cast<double>(n)));
}

enum class TransportClass { always_ohmic, threshold, always_localized };

/// Qualitative phase behavior of a decoherence distribution: subsystem
/// counts falling faster than exponentially give Ohmic transport at any
/// finite decoherence; slower than exponentially, localization survives.
inline TransportClass classify_distribution(const DecoherenceModel& model) {
  model.validate();
  switch (model.kind) {
    case ModelKind::bernoulli:
      return TransportClass::threshold;
    case ModelKind::homogeneous:
    case ModelKind::cutoff:
      return TransportClass::always_ohmic;
    case ModelKind::power_law:
      return TransportClass::always_localized;
  }
  throw std::logic_error("classify_distribution: unknown model kind");
}

}  // namespace decotrans
