#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "decotrans/analytic.hpp"
#include "decotrans/rng.hpp"
#include "oracles.hpp"

using namespace decotrans;

TEST_CASE("localization exponent spot values") {
  CHECK(xi_inverse(1.0) == Catch::Approx(0.4812118251).epsilon(1e-9));
  CHECK(xi_inverse(std::sqrt(2.0)) == Catch::Approx(0.8813735870).epsilon(1e-9));
  CHECK(xi_inverse(0.0) == 0.0);
  auto [ap, am] = alpha_pm(xi_inverse(1.0));
  CHECK(ap + am == Catch::Approx(1.0).epsilon(1e-14));
  // sech(1/xi) = 1/sqrt(sigma^4/4 + 1)
  CHECK(ap - am == Catch::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-12));
}

TEST_CASE("band-center average resistance small-N closed forms") {
  for (double sigma : {0.3, 1.0, 1.7}) {
    double s2 = sigma * sigma;
    CHECK(avg_resistance_band_center(1, sigma).value() ==
          Catch::Approx(1.0 + s2 / 4.0).epsilon(1e-12));
    CHECK(avg_resistance_band_center(2, sigma).value() ==
          Catch::Approx(1.0 + s2 / 2.0 + s2 * s2 / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("band-center average stays finite at astronomic lengths") {
  LogReal r = avg_resistance_band_center(1000000, 1.0);
  CHECK(std::isfinite(r.log()));
  CHECK(r.log() == Catch::Approx(1000000 * xi_inverse(1.0)).epsilon(1e-3));
}

TEST_CASE("cubic roots satisfy the Vieta identities") {
  std::mt19937_64 rng = make_substream(31, 0);
  std::uniform_real_distribution<double> de(-2.5, 2.5), ds(0.05, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    double e = de(rng), s = ds(rng);
    CubicRootSet roots = cubic_roots(e, s);
    if (roots.degenerate) continue;
    double e2 = e * e, s2 = s * s;
    auto sum = roots.z1 + roots.z2 + roots.z3;
    auto pair = roots.z1 * roots.z2 + roots.z1 * roots.z3 + roots.z2 * roots.z3;
    auto prod = roots.z1 * roots.z2 * roots.z3;
    CHECK(std::abs(sum - (e2 - s2 - 1.0)) < 1e-11);
    CHECK(std::abs(pair - (e2 + s2 - 1.0)) < 1e-11);
    CHECK(std::abs(prod - 1.0) < 1e-11);
  }
}

TEST_CASE("band-center roots take their closed form") {
  double s = 1.3, s2 = s * s;
  CubicRootSet roots = cubic_roots(0.0, s);
  double z1 = -s2 / 2.0 + std::sqrt(s2 * s2 / 4.0 + 1.0);
  double z2 = -s2 / 2.0 - std::sqrt(s2 * s2 / 4.0 + 1.0);
  std::vector<double> expect{z1, z2, -1.0};
  for (std::complex<double> z : {roots.z1, roots.z2, roots.z3}) {
    CHECK(std::abs(z.imag()) < 1e-12);
    double best = 1e9;
    for (double w : expect) best = std::min(best, std::abs(z.real() - w));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("general average matches the band-center closed form") {
  for (int n : {1, 2, 5, 20, 100}) {
    for (double sigma : {0.3, 1.0}) {
      LogReal a = avg_resistance_band_center(n, sigma);
      LogReal b = avg_resistance_general(n, 0.0, sigma, {0.0, -1.0});
      CHECK(a.log() == Catch::Approx(b.log()).margin(1e-9));
    }
  }
}

TEST_CASE("general average matches brute-force quadrature at nonzero energy") {
  // Gauss-like disorder average of 1/T_1 by direct Riemann quadrature.
  double sigma = 0.8, energy = 0.5;
  std::complex<double> gamma{0.3, -0.5};
  double sum = 0.0, norm = 0.0;
  const int k = 4000;
  for (int i = 0; i < k; ++i) {
    double eps = -8.0 * sigma + 16.0 * sigma * (i + 0.5) / k;
    double w = std::exp(-eps * eps / (2.0 * sigma * sigma));
    sum += w * oracles::chain_inverse_transmission({eps}, energy, gamma);
    norm += w;
  }
  LogReal got = avg_resistance_general(1, energy, sigma, gamma);
  CHECK(got.value() == Catch::Approx(sum / norm).epsilon(1e-6));
}

TEST_CASE("subsystem census sums to the sites and cuts") {
  for (int n : {2, 5, 40}) {
    for (double p : {0.1, 0.5, 0.9}) {
      SubsystemCensus census = subsystem_counts(n, p);
      double sites = 0.0, count = 0.0;
      for (int j = 1; j <= n; ++j) {
        sites += j * census.u[j - 1];
        count += census.u[j - 1];
      }
      CHECK(sites == Catch::Approx(static_cast<double>(n)).epsilon(1e-12));
      CHECK(count == Catch::Approx(1.0 + (n - 1) * p).epsilon(1e-12));
    }
  }
}

TEST_CASE("census resistivity equals exhaustive enumeration") {
  // All 2^(N-1) decoherence configurations of a short chain, weighted by
  // their Bernoulli probability.
  const int n = 5;
  for (double p : {0.2, 0.7}) {
    for (double sigma : {0.5, 1.0}) {
      double expect = 0.0;
      for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
        double w = 1.0;
        std::vector<int> cuts;
        for (int b = 1; b < n; ++b) {
          if (mask & (1 << (b - 1))) {
            cuts.push_back(b);
            w *= p;
          } else {
            w *= 1.0 - p;
          }
        }
        double r = 0.0;
        for (int len : partition_chain(n, cuts))
          r += avg_resistance_band_center(len, sigma).value();
        expect += w * r;
      }
      expect /= n;
      CHECK(census_resistivity(n, p, sigma).value() == Catch::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("critical decoherence and divergence of the closed form") {
  CHECK(critical_decoherence(1.0) == Catch::Approx(0.381966).margin(1e-6));
  CHECK(critical_decoherence(std::sqrt(2.0)) == Catch::Approx(0.585786).margin(1e-6));
  // The Ohmic denominator vanishes exactly at p*.
  for (double sigma = 0.2; sigma <= 2.0; sigma += 0.3) {
    double p = critical_decoherence(sigma);
    double s2 = sigma * sigma;
    CHECK(std::abs(p - s2 * (1.0 - p) / (2.0 - p)) < 1e-10);
  }
}

TEST_CASE("infinite-chain resistivity spot values and series form") {
  Resistivity r1 = resistivity_random(1.0, 1.0);
  REQUIRE(r1.ohmic);
  CHECK(r1.value == Catch::Approx(1.25).epsilon(1e-12));
  Resistivity r2 = resistivity_random(0.5, 0.5);
  REQUIRE(r2.ohmic);
  CHECK(r2.value == Catch::Approx(0.575).epsilon(1e-12));
  for (double p : {0.5, 0.7, 0.95}) {
    Resistivity r = resistivity_random(p, 1.0);
    REQUIRE(r.ohmic);
    CHECK(r.value == Catch::Approx(resistivity_random_series(p, 1.0)).epsilon(1e-9));
  }
  Resistivity loc = resistivity_random(0.1, 1.0);
  CHECK_FALSE(loc.ohmic);
  CHECK(loc.growth_rate ==
        Catch::Approx(xi_inverse(1.0) - ell_inverse(0.1)).epsilon(1e-12));
}

TEST_CASE("regularly spaced decoherence resistivity") {
  CHECK(resistivity_homogeneous(1.0, 1.0).value() == Catch::Approx(1.25).epsilon(1e-12));
  CHECK(resistivity_homogeneous(2.0, 1.0).value() == Catch::Approx(0.875).epsilon(1e-12));
  // sigma = 0: contact resistance only, rho = 1/ell_phi.
  CHECK(resistivity_homogeneous(2.5, 0.0).value() == Catch::Approx(0.4).epsilon(1e-12));
  // Finite at any coherence length: the subsystems never localize further.
  CHECK(std::isfinite(resistivity_homogeneous(5000.0, 1.0).log()));
}

TEST_CASE("distribution classes") {
  CHECK(classify_distribution(DecoherenceModel::homogeneous(3.0)) ==
        TransportClass::always_ohmic);
  CHECK(classify_distribution(DecoherenceModel::cutoff(0.05, 8)) ==
        TransportClass::always_ohmic);
  CHECK(classify_distribution(DecoherenceModel::bernoulli(0.3)) == TransportClass::threshold);
  CHECK(classify_distribution(DecoherenceModel::power_law(2.5)) ==
        TransportClass::always_localized);
}
