#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "decotrans/lattice.hpp"
#include "decotrans/negf.hpp"

namespace decotrans {

struct DegenerateNetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DisconnectedNetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProbeMode { bond_replacing, site_attached };

/// Concrete placement of virtual reservoirs for one sample. For chains,
/// cut_bonds holds bond indices b in 1..N-1 (bond b joins sites b-1 and b);
/// for ribbons they index the bond list of ribbon_bonds(). attached_sites
/// are site indices. Both sets are kept sorted and duplicate-free.
struct DecoherenceConfiguration {
  ProbeMode mode = ProbeMode::bond_replacing;
  std::vector<int> cut_bonds;
  std::vector<int> attached_sites;
  SelfEnergy probe = SelfEnergy::wide_band({});  // template: sites filled on realization
};

/// Bonds of an N x M ribbon in a fixed enumeration order (per column:
/// vertical bonds, then horizontal bonds to the next column).
inline std::vector<std::pair<int, int>> ribbon_bonds(int n, int m) {
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(static_cast<std::size_t>(n * (2 * m - 1) - m));
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < m; ++r) {
      int i = c * m + r;
      if (r + 1 < m) bonds.emplace_back(i, i + 1);
      if (c + 1 < n) bonds.emplace_back(i, i + m);
    }
  }
  return bonds;
}

/// Lengths of the contiguous coherent segments a set of cut bonds produces.
inline std::vector<int> partition_chain(int n, const std::vector<int>& cut_bonds) {
  std::vector<int> cuts = cut_bonds;
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> lengths;
  int prev = 0;
  for (int b : cuts) {
    if (b < 1 || b > n - 1) throw std::out_of_range("partition_chain: bond index out of range");
    lengths.push_back(b - prev);
    prev = b;
  }
  lengths.push_back(n - prev);
  return lengths;
}

/// Series resistance of fully phase-randomized subsystems, in units
/// of h/e^2.
inline double serial_resistance(std::span<const double> transmissions) {
  double r = 0.0;
  for (double t : transmissions) {
    if (t <= 0.0)
      throw DisconnectedNetworkError("serial_resistance: nonpositive transmission");
    r += 1.0 / t;
  }
  return r;
}

struct NetworkSolution {
  double resistance = 0.0;
  double denominator = 0.0;          // T_DS + sum_ij T_Di R_ij T_jS
  Eigen::VectorXd probe_potentials;  // chemical potentials at mu_S = 1, mu_D = 0
};

/// Total resistance of the multi-reservoir network (source = row 0,
/// drain = row 1, virtual probes after). Solves the zero-net-current
/// constraint for the probe potentials and assembles
/// R = 1 / (T_DS + sum_ij T_Di R_ij T_jS).
inline NetworkSolution network_solve(const TransmissionMatrix& tm) {
  const Eigen::Index m = tm.t.rows();
  if (m < 2 || tm.t.cols() != m)
    throw std::invalid_argument("network_solve: need a square matrix with >= 2 reservoirs");
  NetworkSolution sol;
  if (m == 2) {
    sol.denominator = tm.t(1, 0);
  } else {
    const Eigen::Index np = m - 2;
    Eigen::MatrixXd rinv(np, np);
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index j = 0; j < np; ++j)
        rinv(i, j) = (i == j) ? tm.t.row(i + 2).sum() : -tm.t(i + 2, j + 2);
    }
    Eigen::VectorXd ts = tm.t.col(0).segment(2, np);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(rinv);
    Eigen::VectorXd mu = lu.solve(ts);
    double residual = (rinv * mu - ts).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, ts.cwiseAbs().maxCoeff());
    if (!mu.allFinite() || residual > 1e-8 * scale)
      throw DegenerateNetworkError("network_solve: probe block is numerically singular");
    sol.probe_potentials = mu;
    sol.denominator = tm.t(1, 0) + tm.t.row(1).segment(2, np).dot(mu);
  }
  if (sol.denominator <= 0.0)
    throw DisconnectedNetworkError("network_solve: no transmission path from source to drain");
  sol.resistance = 1.0 / sol.denominator;
  return sol;
}

inline double network_resistance(const TransmissionMatrix& tm) {
  return network_solve(tm).resistance;
}

/// Effective Hamiltonian plus self-energy set for one decoherence
/// configuration. Reservoir order: source, drain, then one virtual
/// reservoir per cut bond (spanning both orphaned sites) or per attached
/// site.
struct ProbeRealization {
  Eigen::MatrixXd h;
  std::vector<SelfEnergy> selfenergies;
};

inline ProbeRealization realize_probes(const LatticeSpec& lattice,
                                       const DecoherenceConfiguration& config) {
  lattice.validate();
  ProbeRealization out;
  out.h = build_hamiltonian(lattice);
  const int m = lattice.width;

  std::vector<int> source_sites, drain_sites;
  for (int r = 0; r < m; ++r) {
    source_sites.push_back(lattice.site(0, r));
    drain_sites.push_back(lattice.site(lattice.length - 1, r));
  }
  out.selfenergies.push_back(SelfEnergy::wide_band(std::move(source_sites)));
  out.selfenergies.push_back(SelfEnergy::wide_band(std::move(drain_sites)));

  auto probe_on = [&](std::vector<int> sites) {
    SelfEnergy se = config.probe;
    se.sites = std::move(sites);
    out.selfenergies.push_back(std::move(se));
  };

  if (config.mode == ProbeMode::bond_replacing) {
    if (m == 1) {
      for (int b : config.cut_bonds) {
        if (b < 1 || b > lattice.length - 1)
          throw std::out_of_range("realize_probes: bond index out of range");
        out.h(b - 1, b) = 0.0;
        out.h(b, b - 1) = 0.0;
        // One phase-and-momentum-randomizing reservoir spans the cut.
        probe_on({b - 1, b});
      }
    } else {
      auto bonds = ribbon_bonds(lattice.length, m);
      for (int b : config.cut_bonds) {
        if (b < 0 || b >= static_cast<int>(bonds.size()))
          throw std::out_of_range("realize_probes: bond index out of range");
        auto [i, j] = bonds[static_cast<std::size_t>(b)];
        out.h(i, j) = 0.0;
        out.h(j, i) = 0.0;
        probe_on({i, j});
      }
    }
  } else {
    for (int s : config.attached_sites) {
      if (s < 0 || s >= lattice.sites())
        throw std::out_of_range("realize_probes: site index out of range");
      probe_on({s});
    }
  }
  return out;
}

}  // namespace decotrans
