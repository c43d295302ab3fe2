#include <cmath>

#include "doctest.h"
#include "dunkl/errors.hpp"
#include "dunkl/freezing.hpp"

using namespace dunkl;

TEST_CASE("hermite zeros") {
  const Vec z3 = hermite_zeros(3);
  CHECK(z3[0] == doctest::Approx(-std::sqrt(1.5)));
  CHECK(z3[1] == 0.0);
  CHECK(z3[2] == doctest::Approx(std::sqrt(1.5)));
  const Vec z4 = hermite_zeros(4);
  CHECK(z4[3] == doctest::Approx(1.650680123885785));
  CHECK(z4[2] == doctest::Approx(0.5246476232752903));
  CHECK(z4[0] == -z4[3]);
  for (int n : {5, 20, 40}) {
    const auto [lin, cub] = hermite_identity_residuals(hermite_zeros(n));
    CHECK(lin < 1e-10);
    CHECK(cub < 1e-9);
  }
  CHECK_THROWS_AS(gauss_hermite(0), DimensionError);
  CHECK_THROWS_AS(gauss_hermite(51), DimensionError);
}

TEST_CASE("gauss-hermite moments") {
  const GaussHermiteRule r = gauss_hermite(10);
  const double sp = std::sqrt(M_PI);
  CHECK(r.weights.sum() == doctest::Approx(sp));
  CHECK((r.weights.array() * r.nodes.array().square()).sum() == doctest::Approx(sp / 2));
  CHECK((r.weights.array() * r.nodes.array().pow(4)).sum() == doctest::Approx(3 * sp / 4));
  CHECK(std::abs((r.weights.array() * r.nodes.array().pow(3)).sum()) < 1e-14);
}

TEST_CASE("peak vectors") {
  const PeakVector b1 = peak_vector(build_root_system(Family::B, 1, 2.0));
  CHECK(b1.z[0] == doctest::Approx(1.0));
  for (int n = 2; n <= 6; ++n) {
    const RootSystem s = build_root_system(Family::B, n, 2.0);
    const PeakVector p = peak_vector(s);
    CHECK(p.residual < 1e-12);
    CHECK(p.z.squaredNorm() == doctest::Approx(s.gamma()).epsilon(1e-12));
    CHECK(chamber_interior(s, p.z));
  }
  Multiplicities k;
  k.root = 2.5;
  const RootSystem a = build_root_system(Family::A, 4, 2.0, k);
  const PeakVector p = peak_vector(a);
  CHECK((p.z - std::sqrt(2.5) * hermite_zeros(4)).norm() < 1e-12);
}

TEST_CASE("frozen rates") {
  const RootSystem s = build_root_system(Family::A, 2, 2.0);
  const auto r = frozen_rates(s, peak_vector(s).z);
  CHECK(r[0] == doctest::Approx(0.25));
  const RateTable t = frozen_rate_table(s, peak_vector(s));
  CHECK(t.sampler == "frozen");
  CHECK(t.total == doctest::Approx(0.25));
}

TEST_CASE("pf spectrum") {
  for (int n = 2; n <= 6; ++n) {
    const PFSpectrumReport r = pf_spectrum(n);
    CHECK(r.half_multiplicity == static_cast<std::size_t>(n - 1));
    CHECK(r.min_eigenvalue == doctest::Approx(-n * (n - 1) / 4.0));
    CHECK(r.symmetry_deviation < 1e-9);
  }
  const PFSpectrumReport r3 = pf_spectrum(3);
  const double expected[] = {0.0, -0.5, -0.5, -1.0, -1.0, -1.5};
  for (int i = 0; i < 6; ++i) CHECK(r3.spectrum.values[i] == doctest::Approx(expected[i]));
  CHECK_THROWS_AS(pf_spectrum(8), SizeError);
}

TEST_CASE("su(N) generators") {
  for (int n = 2; n <= 4; ++n) {
    const auto gens = su_generators(n);
    CHECK(gens.size() == static_cast<std::size_t>(n * n - 1));
    const auto f = structure_constants(gens);
    const std::size_t g = gens.size();
    double anti = 0.0;
    for (std::size_t a = 0; a < g; ++a)
      for (std::size_t b = 0; b < g; ++b)
        for (std::size_t c = 0; c < g; ++c) anti = std::max(anti, std::abs(f[(a * g + b) * g + c] + f[(b * g + a) * g + c]));
    CHECK(anti < 1e-14);
  }
}

TEST_CASE("exchange and ladder identities") {
  for (int n = 2; n <= 5; ++n) CHECK(verify_exchange_identity(n) < 1e-12);
  for (int n = 2; n <= 3; ++n) {
    const LadderReport r = verify_ladder_commutators(n);
    CHECK(r.commutator_K < 1e-10);
    CHECK(r.commutator_L < 1e-10);
    const SubspaceReport s = verify_ladder_subspace(n);
    CHECK(s.verdicts_ok);
    for (const auto& e : s.entries) CHECK(e.stays == (e.j == e.l));
  }
  CHECK_THROWS(verify_ladder_commutators(5));
}
