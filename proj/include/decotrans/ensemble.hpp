#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "decotrans/analytic.hpp"
#include "decotrans/lattice.hpp"
#include "decotrans/model.hpp"
#include "decotrans/negf.hpp"
#include "decotrans/probes.hpp"
#include "decotrans/rng.hpp"
#include "decotrans/stats.hpp"

namespace decotrans {

struct EngineDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Averaging { resistance, conductance };
enum class DisorderPath { analytic, sampled };

/// How the decoherence ensemble is averaged. `sampled` draws configurations
/// Monte Carlo; `exact_census` evaluates the expectation over the subsystem
/// census deterministically (bernoulli + bond_replacing + analytic disorder +
/// resistance averaging only). The exact route is the only viable one deep in
/// the localized regime, where the ensemble mean is carried by configurations
/// far too rare to sample.
enum class DecoherencePath { sampled, exact_census };

enum class Observable { resistivity_R, resistivity_G };

struct EnsembleSpec {
  int n = 100;
  int m = 1;
  double energy = 0.0;
  DisorderSpec disorder;
  DecoherenceModel model;
  long samples = 1000;
  std::uint64_t seed = 0;
  Averaging averaging = Averaging::resistance;
  DisorderPath disorder_path = DisorderPath::analytic;
  DecoherencePath decoherence_path = DecoherencePath::sampled;
  std::complex<double> probe_gamma{0.0, -1.0};
  int threads = 1;

  void validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("EnsembleSpec: N, M must be >= 1");
    if (samples < 1) throw std::invalid_argument("EnsembleSpec: samples must be >= 1");
    model.validate();
    if (disorder_path == DisorderPath::analytic &&
        (m != 1 || model.placement != ProbeMode::bond_replacing || energy != 0.0))
      throw std::invalid_argument(
          "EnsembleSpec: analytic disorder path requires a bond-replacing chain at E = 0");
    if (decoherence_path == DecoherencePath::exact_census &&
        (model.kind != ModelKind::bernoulli || disorder_path != DisorderPath::analytic ||
         averaging != Averaging::resistance))
      throw std::invalid_argument(
          "EnsembleSpec: exact census requires bernoulli + analytic disorder + resistance "
          "averaging");
    if (m > 1 && model.placement != ProbeMode::bond_replacing)
      throw std::invalid_argument("EnsembleSpec: ribbons support bond_replacing only");
    if (m > 1 && model.kind != ModelKind::bernoulli)
      throw std::invalid_argument("EnsembleSpec: ribbons support the bernoulli model only");
  }
};

struct EnsembleEstimate {
  LogReal mean;
  LogReal stderr_of_mean;
  long samples_used = 0;  // 0 for the deterministic exact-census route
  Observable observable = Observable::resistivity_R;
};

/// One decoherence configuration over `n_bonds` bonds (bond ids 1..n_bonds).
inline DecoherenceConfiguration sample_configuration(const DecoherenceModel& model, int n_bonds,
                                                     std::mt19937_64& rng) {
  model.validate();
  if (n_bonds < 0) throw std::invalid_argument("sample_configuration: n_bonds must be >= 0");
  std::vector<int> cuts;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  switch (model.kind) {
    case ModelKind::bernoulli:
      for (int b = 1; b <= n_bonds; ++b)
        if (unit(rng) < model.p) cuts.push_back(b);
      break;
    case ModelKind::homogeneous: {
      // Regular spacing; non-integer ell_phi alternates floor/ceil lengths so
      // the mean subsystem length stays ell_phi.
      const int base = static_cast<int>(std::floor(model.ell_phi));
      const double frac = model.ell_phi - base;
      double carry = 0.0;
      int pos = 0;
      while (true) {
        int len = base;
        carry += frac;
        if (carry >= 1.0 - 1e-12) {
          carry -= 1.0;
          ++len;
        }
        pos += len;
        if (pos > n_bonds) break;
        cuts.push_back(pos);
      }
      break;
    }
    case ModelKind::cutoff: {
      int run = 0;
      for (int b = 1; b <= n_bonds; ++b) {
        ++run;
        if (unit(rng) < model.p || run == model.j_max) {
          cuts.push_back(b);
          run = 0;
        }
      }
      break;
    }
    case ModelKind::power_law: {
      // i.i.d. subsystem lengths with P(j) ~ j^-gamma, truncated at the chain
      // length and renormalized.
      const int n_sites = n_bonds + 1;
      std::vector<double> cdf(n_sites);
      double acc = 0.0;
      for (int j = 1; j <= n_sites; ++j) {
        acc += std::pow(static_cast<double>(j), -model.gamma);
        cdf[j - 1] = acc;
      }
      int pos = 0;
      while (pos < n_sites) {
        double u = unit(rng) * acc;
        int lo = 0, hi = n_sites - 1;
        while (lo < hi) {
          int mid = (lo + hi) / 2;
          if (cdf[mid] < u)
            lo = mid + 1;
          else
            hi = mid;
        }
        pos += lo + 1;
        if (pos < n_sites) cuts.push_back(pos);
      }
      break;
    }
  }

  DecoherenceConfiguration config;
  config.mode = model.placement;
  if (model.placement == ProbeMode::bond_replacing) {
    config.cut_bonds = std::move(cuts);
  } else {
    // Attach one probe at the left site of each selected bond.
    for (int b : cuts) config.attached_sites.push_back(b - 1);
  }
  return config;
}

namespace detail {

/// Deterministic parallel map-reduce: samples are grouped into fixed blocks
/// and block statistics are merged in index order, so results are
/// bit-identical for any worker count.
template <class Fn>
inline ScaledRunningStat parallel_ensemble(long samples, int threads, Fn&& fn) {
  constexpr long kBlock = 64;
  const long n_blocks = (samples + kBlock - 1) / kBlock;
  std::vector<ScaledRunningStat> blocks(static_cast<std::size_t>(n_blocks));
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      long b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        long lo = b * kBlock;
        long hi = std::min(samples, lo + kBlock);
        for (long i = lo; i < hi; ++i) blocks[static_cast<std::size_t>(b)].add(fn(i));
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  ScaledRunningStat total;
  for (const auto& blk : blocks) total.merge(blk);
  return total;
}

/// Resistance of one (configuration, disorder) sample, log-domain.
inline LogReal sample_resistance(const EnsembleSpec& spec, std::mt19937_64& rng) {
  const int n_bonds = spec.m == 1 ? spec.n - 1
                                  : spec.n * (2 * spec.m - 1) - spec.m;
  DecoherenceConfiguration config = sample_configuration(spec.model, n_bonds, rng);
  config.probe.nu = spec.probe_gamma.real();
  config.probe.eta = spec.probe_gamma.imag();

  if (spec.m == 1 && config.mode == ProbeMode::bond_replacing) {
    // Fast serial path: exactly equivalent to the full probe network.
    std::vector<int> lengths = partition_chain(spec.n, config.cut_bonds);
    LogReal total;
    for (int len : lengths) {
      if (spec.disorder_path == DisorderPath::analytic) {
        total += avg_resistance_band_center(len, spec.disorder.sigma);
      } else {
        std::vector<double> eps = sample_disorder(spec.disorder, len, rng);
        total += chain_resistance_recursive(eps, spec.energy, {0.0, -1.0});
      }
    }
    return total;
  }

  // Dense NEGF network (attached probes, ribbons).
  LatticeSpec lattice;
  lattice.kind = spec.m == 1 ? LatticeKind::chain : LatticeKind::ribbon;
  lattice.length = spec.n;
  lattice.width = spec.m;
  lattice.onsite = sample_disorder(spec.disorder, spec.n * spec.m, rng);
  if (spec.m > 1) {
    // ribbon bond ids are 0-based positions in the bond list
    for (int& b : config.cut_bonds) --b;
  }
  ProbeRealization real = realize_probes(lattice, config);
  TransmissionMatrix tm = transmission_matrix(real.h, real.selfenergies, spec.energy);
  return LogReal::from_value(network_resistance(tm));
}

}  // namespace detail

/// Monte Carlo (or exact-census) estimate of the resistivity under the
/// requested averaging convention. One fresh disorder realization per
/// configuration in sampled mode; reproducible bit-exactly for a fixed
/// (spec, seed) at any worker count.
inline EnsembleEstimate estimate_resistivity(const EnsembleSpec& spec) {
  spec.validate();
  EnsembleEstimate est;
  est.observable = spec.averaging == Averaging::resistance ? Observable::resistivity_R
                                                           : Observable::resistivity_G;
  const double log_n = std::log(static_cast<double>(spec.n));

  if (spec.decoherence_path == DecoherencePath::exact_census) {
    est.mean = census_resistivity(spec.n, spec.model.p, spec.disorder.sigma);
    est.stderr_of_mean = LogReal();
    est.samples_used = 0;
    return est;
  }

  const bool conductance = spec.averaging == Averaging::conductance;
  ScaledRunningStat stat = detail::parallel_ensemble(
      spec.samples, spec.threads, [&spec, conductance](long index) {
        std::mt19937_64 rng = make_substream(spec.seed, static_cast<std::uint64_t>(index));
        LogReal r = detail::sample_resistance(spec, rng);
        return conductance ? LogReal::from_log(-r.log()) : r;
      });

  est.samples_used = stat.count();
  if (conductance) {
    LogReal mean_g = stat.mean();
    if (mean_g.is_zero())
      throw EngineDivergence("estimate_resistivity: conductance mean is zero");
    est.mean = LogReal::from_log(-log_n - mean_g.log());
    LogReal se = stat.stderr_of_mean();
    if (!se.is_zero())
      est.stderr_of_mean = LogReal::from_log(se.log() - log_n - 2.0 * mean_g.log());
  } else {
    est.mean = LogReal::from_log(stat.mean().log() - log_n);
    LogReal se = stat.stderr_of_mean();
    if (!se.is_zero()) est.stderr_of_mean = LogReal::from_log(se.log() - log_n);
  }
  return est;
}

/// Empirical census: mean count (and standard error) of subsystems of each
/// length for a bond-replacing chain model.
struct CensusHistogram {
  std::vector<double> mean;     // index j-1: subsystems of length j
  std::vector<double> stderr_;  // standard error of the mean count
  long samples = 0;
};

inline CensusHistogram subsystem_histogram(const DecoherenceModel& model, int n, long samples,
                                           std::uint64_t seed) {
  if (model.placement != ProbeMode::bond_replacing)
    throw std::invalid_argument("subsystem_histogram: bond-replacing chain models only");
  std::vector<RunningStat> stats(static_cast<std::size_t>(n));
  std::vector<double> counts(static_cast<std::size_t>(n));
  for (long i = 0; i < samples; ++i) {
    std::mt19937_64 rng = make_substream(seed, static_cast<std::uint64_t>(i));
    DecoherenceConfiguration config = sample_configuration(model, n - 1, rng);
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int len : partition_chain(n, config.cut_bonds)) counts[static_cast<std::size_t>(len - 1)] += 1.0;
    for (int j = 0; j < n; ++j) stats[static_cast<std::size_t>(j)].add(counts[static_cast<std::size_t>(j)]);
  }
  CensusHistogram hist;
  hist.samples = samples;
  for (int j = 0; j < n; ++j) {
    hist.mean.push_back(stats[static_cast<std::size_t>(j)].mean());
    hist.stderr_.push_back(stats[static_cast<std::size_t>(j)].stderr_of_mean());
  }
  return hist;
}

struct SweepRow {
  int n = 0;
  EnsembleEstimate estimate;
};

/// One estimate per chain length, shared model parameters, independent seeds
/// derived from the master seed.
inline std::vector<SweepRow> length_sweep(EnsembleSpec spec, std::span<const int> lengths) {
  if (lengths.empty()) throw std::invalid_argument("length_sweep: empty N list");
  const std::uint64_t master = spec.seed;
  std::vector<SweepRow> rows;
  rows.reserve(lengths.size());
  for (int n : lengths) {
    spec.n = n;
    spec.seed = substream_seed(master, 0x9e3779b9ULL + static_cast<std::uint64_t>(n));
    rows.push_back(SweepRow{n, estimate_resistivity(spec)});
  }
  return rows;
}

}  // namespace decotrans
