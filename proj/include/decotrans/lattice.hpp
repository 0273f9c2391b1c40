#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace decotrans {

enum class LatticeKind { chain, ribbon };

/// Tight-binding geometry: a chain of length N or an N x M square-lattice
/// ribbon. Sites are indexed column-major (all M sites of column 0, then
/// column 1, ...), so the chain is the M=1 special case. Hopping t = 1 is
/// the energy unit throughout.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::chain;
  int length = 1;  // N, sites along the transport direction
  int width = 1;   // M, 1 for chains
  std::vector<double> onsite;

  static LatticeSpec chain(int n, std::vector<double> eps) {
    return LatticeSpec{LatticeKind::chain, n, 1, std::move(eps)};
  }
  static LatticeSpec ribbon(int n, int m, std::vector<double> eps) {
    return LatticeSpec{LatticeKind::ribbon, n, m, std::move(eps)};
  }

  int sites() const { return length * width; }
  int site(int col, int row) const { return col * width + row; }

  void validate() const {
    if (length < 1 || width < 1)
      throw std::invalid_argument("LatticeSpec: N and M must be >= 1");
    if (kind == LatticeKind::chain && width != 1)
      throw std::invalid_argument("LatticeSpec: chain requires M = 1");
    if (static_cast<int>(onsite.size()) != sites())
      throw std::invalid_argument("LatticeSpec: onsite size must equal N*M");
  }
};

enum class DisorderShape { gaussian, uniform };

/// Onsite-energy distribution w(eps): mean 0, variance sigma^2.
struct DisorderSpec {
  double sigma = 0.0;
  DisorderShape shape = DisorderShape::gaussian;
};

/// Reservoir self-energy Gamma = nu + i*eta acting on a set of sites.
/// The wide-band contact limit is Gamma = -i (nu = 0, eta = -1).
struct SelfEnergy {
  double nu = 0.0;
  double eta = -1.0;
  std::vector<int> sites;

  static SelfEnergy wide_band(std::vector<int> s) { return SelfEnergy{0.0, -1.0, std::move(s)}; }

  std::complex<double> gamma() const { return {nu, eta}; }
};

/// Real symmetric N*M x N*M tight-binding Hamiltonian: onsite energies on
/// the diagonal, t = 1 on nearest-neighbor bonds of the (chain or ribbon)
/// lattice.
inline Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.sites();
  const int m = spec.width;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = spec.onsite[i];
  for (int c = 0; c < spec.length; ++c) {
    for (int r = 0; r < m; ++r) {
      int i = spec.site(c, r);
      if (r + 1 < m) {
        h(i, i + 1) = 1.0;
        h(i + 1, i) = 1.0;
      }
      if (c + 1 < spec.length) {
        h(i, i + m) = 1.0;
        h(i + m, i) = 1.0;
      }
    }
  }
  return h;
}

/// n i.i.d. onsite energies; deterministic given the stream state.
inline std::vector<double> sample_disorder(const DisorderSpec& spec, int n,
                                           std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample_disorder: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (spec.sigma == 0.0) return out;
  if (spec.shape == DisorderShape::gaussian) {
    std::normal_distribution<double> dist(0.0, spec.sigma);
    for (auto& x : out) x = dist(rng);
  } else {
    // Support [-sqrt(3) sigma, +sqrt(3) sigma] makes the variance exactly sigma^2.
    const double half = std::sqrt(3.0) * spec.sigma;
    std::uniform_real_distribution<double> dist(-half, half);
    for (auto& x : out) x = dist(rng);
  }
  return out;
}

}  // namespace decotrans
