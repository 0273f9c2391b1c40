#pragma once

#include <stdexcept>

#include "decotrans/probes.hpp"

namespace decotrans {

enum class ModelKind { bernoulli, homogeneous, cutoff, power_law };

/// Statistical law generating decoherence configurations.
///   bernoulli(p)        — each bond cut independently with probability p
///   homogeneous(ell)    — cuts at regular spacing, subsystem length ell_phi
///   cutoff(p, j_max)    — bernoulli, but a cut is forced after j_max uncut bonds
///   power_law(gamma)    — i.i.d. subsystem lengths with probability ~ j^(-gamma)
struct DecoherenceModel {
  ModelKind kind = ModelKind::bernoulli;
  double p = 0.0;
  double ell_phi = 1.0;
  int j_max = 1;
  double gamma = 1.0;
  ProbeMode placement = ProbeMode::bond_replacing;

  static DecoherenceModel bernoulli(double prob, ProbeMode mode = ProbeMode::bond_replacing) {
    DecoherenceModel m;
    m.kind = ModelKind::bernoulli;
    m.p = prob;
    m.placement = mode;
    return m;
  }
  static DecoherenceModel homogeneous(double ell) {
    DecoherenceModel m;
    m.kind = ModelKind::homogeneous;
    m.ell_phi = ell;
    return m;
  }
  static DecoherenceModel cutoff(double prob, int jmax) {
    DecoherenceModel m;
    m.kind = ModelKind::cutoff;
    m.p = prob;
    m.j_max = jmax;
    return m;
  }
  static DecoherenceModel power_law(double g) {
    DecoherenceModel m;
    m.kind = ModelKind::power_law;
    m.gamma = g;
    return m;
  }

  void validate() const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("DecoherenceModel: p must be in [0,1]");
    if (ell_phi < 1.0) throw std::invalid_argument("DecoherenceModel: ell_phi must be >= 1");
    if (j_max < 1) throw std::invalid_argument("DecoherenceModel: j_max must be >= 1");
    if (gamma <= 0.0) throw std::invalid_argument("DecoherenceModel: gamma must be > 0");
  }
};

}  // namespace decotrans
