#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "decotrans/lattice.hpp"
#include "decotrans/log_real.hpp"

namespace decotrans {

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Retarded Green's function G = [E - H - sum_k Gamma_k]^(-1) at energy E.
struct GreenFunction {
  double energy = 0.0;
  Eigen::MatrixXcd g;
};

inline GreenFunction green_function(const Eigen::MatrixXd& h,
                                    std::span<const SelfEnergy> selfenergies,
                                    double energy) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXcd a = -h.cast<std::complex<double>>();
  a.diagonal().array() += energy;
  bool absorbing = false;
  for (const auto& se : selfenergies) {
    for (int s : se.sites) {
      if (s < 0 || s >= n) throw std::invalid_argument("green_function: site index out of range");
      a(s, s) -= se.gamma();
    }
    if (se.eta != 0.0) absorbing = true;
  }
  if (!absorbing)
    throw std::invalid_argument("green_function: at least one self-energy needs eta != 0");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  if (lu.rcond() < 1e-14)
    throw SingularMatrixError("green_function: shifted Hamiltonian is numerically singular");
  GreenFunction gf;
  gf.energy = energy;
  gf.g = lu.inverse();
  return gf;
}

/// Transmission T_ij = 4 Tr[Im(Gamma_i) G Im(Gamma_j) G+] between two
/// reservoirs. Im(Gamma) is diagonal (eta on the reservoir's sites), so the
/// trace collapses to a sum over site pairs.
inline double transmission(const GreenFunction& gf, const SelfEnergy& gi,
                           const SelfEnergy& gj) {
  double sum = 0.0;
  for (int a : gi.sites)
    for (int b : gj.sites) sum += std::norm(gf.g(a, b));
  double t = 4.0 * gi.eta * gj.eta * sum;
  if (t < 0.0) {
    if (t < -1e-12) throw std::logic_error("transmission: negative beyond roundoff slack");
    t = 0.0;
  }
  return t;
}

/// Reservoir-to-reservoir transmissions; row/column order follows the
/// self-energy list (convention: index 0 = source, 1 = drain, rest probes).
/// Diagonal is zero.
struct TransmissionMatrix {
  Eigen::MatrixXd t;
};

inline TransmissionMatrix transmission_matrix(const Eigen::MatrixXd& h,
                                              std::span<const SelfEnergy> selfenergies,
                                              double energy) {
  GreenFunction gf = green_function(h, selfenergies, energy);
  const int m = static_cast<int>(selfenergies.size());
  TransmissionMatrix tm;
  tm.t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double v = transmission(gf, selfenergies[i], selfenergies[j]);
      tm.t(i, j) = v;
      tm.t(j, i) = v;
    }
  }
  return tm;
}

/// Two-terminal resistance 1/T_N of a chain with identical self-energy
/// Gamma = nu + i*eta on the first and last site, via the tridiagonal
/// determinant recursion
///   r_i = (E - eps_i) r_{i-1} - r_{i-2},   r_0 = 1, r_{-1} = 0,
///   s_i = (E - eps_i) s_{i-1} - s_{i-2},   s_1 = 1, s_0 = 0,
///   1/T_N = |r_N - Gamma r_{N-1} - Gamma s_N + Gamma^2 s_{N-1}|^2 / (4 eta^2).
/// The polynomials grow exponentially in the localized regime; a shared
/// power-of-two exponent keeps N up to 1e4 in range.
inline LogReal chain_resistance_recursive(std::span<const double> onsite, double energy,
                                          std::complex<double> gamma) {
  const double eta = gamma.imag();
  if (eta == 0.0)
    throw std::invalid_argument("chain_resistance_recursive: eta must be nonzero");
  if (onsite.empty())
    throw std::invalid_argument("chain_resistance_recursive: empty chain");

  double r_prev = 0.0, r_cur = 1.0;   // r_{-1}, r_0
  double s_prev = -1.0, s_cur = 0.0;  // s_{-1}, s_0 (s_1 = 1 follows)
  long exp2 = 0;
  constexpr double kLimit = 1.3407807929942597e154;  // 2^512
  constexpr double kScale = 7.458340731200207e-155;  // 2^-512

  for (double eps : onsite) {
    const double x = energy - eps;
    double r_next = x * r_cur - r_prev;
    double s_next = x * s_cur - s_prev;
    r_prev = r_cur;
    r_cur = r_next;
    s_prev = s_cur;
    s_cur = s_next;
    if (std::abs(r_cur) > kLimit || std::abs(s_cur) > kLimit) {
      r_prev *= kScale;
      r_cur *= kScale;
      s_prev *= kScale;
      s_cur *= kScale;
      exp2 += 512;
    }
  }

  std::complex<double> expr = r_cur - gamma * r_prev - gamma * s_cur + gamma * gamma * s_prev;
  double log_val = std::log(std::norm(expr) / (4.0 * eta * eta)) +
                   2.0 * static_cast<double>(exp2) * std::log(2.0);
  return LogReal::from_log(log_val);
}

}  // namespace decotrans
