#include <cmath>

#include "doctest.h"
#include "dunkl/dunklsim.hpp"
#include "dunkl/errors.hpp"

using namespace dunkl;

TEST_CASE("jump trajectories replay through the group table") {
  const RootSystem s = build_root_system(Family::A, 3, 3.0);
  const GroupTable g = GroupTable::enumerate(s);
  const RateTable rates = estimate_rates_origin(s, 1000, 1);
  const Vec x0 = default_start(Family::A, 3, 0.5);
  const DunklPath p = simulate_dunkl(s, g, x0, 2.0, 1e-3, 21);
  const DunklPath q = simulate_dunkl(s, g, x0, 2.0, 1e-3, 21);
  REQUIRE(p.jumps.count() == q.jumps.count());
  CHECK(p.jumps.count() > 0);
  int idx = 0;
  double last = 0.0;
  for (const auto& e : p.jumps.events) {
    CHECK(e.time > last);
    CHECK(e.time < 2.0);
    last = e.time;
    idx = g.right_mult(e.root)[idx];
    CHECK(e.group_index == idx);
    CHECK(p.jumps.group_at(e.time) == idx);
  }
  CHECK(p.jumps.group_at(0.0) == 0);
  const auto full = reconstruct_full_path(p, g);
  REQUIRE(full.size() == p.radial.states.size());
  for (std::size_t i = 0; i < full.size(); ++i)
    CHECK(full[i].norm() == doctest::Approx(p.radial.states[i].norm()).epsilon(1e-12));
  (void)rates;
}

TEST_CASE("table-free simulation agrees with the group table") {
  for (Family f : {Family::A, Family::B}) {
    const RootSystem s = build_root_system(f, 3, 2.5);
    const GroupTable g = GroupTable::enumerate(s);
    for (std::size_t i = 0; i < g.order(); ++i) CHECK(lexicographic_rank(g.element(i), f) == static_cast<std::int64_t>(i));
    const Vec x0 = default_start(f, 3, 0.5);
    const DunklPath p = simulate_dunkl(s, g, x0, 2.0, 1e-3, 33, 5);
    const DunklPath q = simulate_dunkl(s, x0, 2.0, 1e-3, 33, 5);
    REQUIRE(p.jumps.count() == q.jumps.count());
    CHECK(p.jumps.count() > 0);
    for (std::size_t e = 0; e < p.jumps.count(); ++e) {
      CHECK(p.jumps.events[e].root == q.jumps.events[e].root);
      CHECK(p.jumps.events[e].group_index == q.jumps.events[e].group_index);
    }
    const auto a = reconstruct_full_path(p, g);
    const auto b = reconstruct_full_path(q, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
  }
  CHECK(lexicographic_rank(reflection_element(build_root_system(Family::A, 21, 2.0).root(0), 21), Family::A) == -1);
}

TEST_CASE("mismatched group table") {
  const RootSystem s = build_root_system(Family::A, 3, 3.0);
  const GroupTable g = GroupTable::enumerate(build_root_system(Family::B, 3, 3.0));
  CHECK_THROWS_AS(simulate_dunkl(s, g, default_start(Family::A, 3, 1.0), 1.0, 1e-3, 1), MismatchError);
}

TEST_CASE("default start points") {
  for (Family f : {Family::A, Family::B}) {
    const Vec x = default_start(f, 5, 0.7);
    CHECK(x.norm() == doctest::Approx(0.7));
    CHECK(chamber_interior(build_root_system(f, 5, 2.0), x));
  }
  CHECK(default_start(Family::A, 4, 1.0).sum() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("closed-form per-particle rates") {
  for (int n = 2; n <= 10; ++n) {
    const double beta = 3.0;
    const double a = per_particle_rate(Family::A, n, beta, Vec::Zero(n), RateMode::ClosedForm);
    CHECK(a == doctest::Approx(beta * (n - 1) / (8.0 * (beta - 1) * n)));
    const double b = per_particle_rate(Family::B, n, beta, Vec::Zero(n), RateMode::ClosedForm);
    CHECK(b == doctest::Approx(beta / (4.0 * (beta - 1))));
  }
  CHECK(per_particle_limit(Family::A, 2.0) == 0.25);
  CHECK(per_particle_limit(Family::B, 2.0) == 0.5);
  CHECK(rate_mode_from_string(to_string(RateMode::Simulate)) == RateMode::Simulate);
  const auto rows = phase_sweep(Family::A, 2.0, 2, 6, RateMode::ClosedForm);
  CHECK(rows.size() == 5);
  CHECK(rows.back().theory == 0.25);
}

TEST_CASE("jump count statistics") {
  JumpCountRecord rec;
  rec.times = {1.0, 2.0};
  Philox rng(3, 0);
  for (int r = 0; r < 4000; ++r) {
    // Poisson(0.5) by inversion.
    double u = rng.uniform(), p = std::exp(-0.5), c = p;
    std::size_t k = 0;
    while (u > c) {
      ++k;
      p *= 0.5 / k;
      c += p;
    }
    rec.counts.push_back({0, k});
  }
  const JumpCountReport rep = jump_count_stats(rec, 0.5 / std::log(2.0), 2.0);
  CHECK(rep.predicted_mean == doctest::Approx(0.5));
  CHECK(std::abs(rep.mean - 0.5) < 4 * rep.mean_stderr);
  CHECK(std::abs(rep.variance - 0.5) < 4 * rep.variance_stderr);
  CHECK(rep.dispersion_pvalue > 0.001);
  CHECK(rep.gof_pvalue > 0.001);
}

TEST_CASE("jump counts from the origin") {
  const RootSystem s = build_root_system(Family::A, 2, 4.0);
  const auto rec = count_jumps_from_origin(s, 1.0, {1.0, 1.5, 2.0}, 500, 1e-3, 9);
  REQUIRE(rec.replicas() == 500);
  for (const auto& c : rec.counts) {
    CHECK(c[0] == 0);
    CHECK(c[1] <= c[2]);
  }
  const auto rep = jump_count_stats(rec, 1.0 / 3.0, 2.0);
  CHECK(std::abs(rep.mean - std::log(2.0) / 3.0) < 4 * rep.mean_stderr);
}
