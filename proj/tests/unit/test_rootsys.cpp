#include "doctest.h"
#include "dunkl/errors.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/weylgroup.hpp"

using namespace dunkl;

TEST_CASE("positive root counts and gamma") {
  CHECK(build_root_system(Family::A, 4, 2.0).size() == 6);
  CHECK(build_root_system(Family::B, 3, 2.0).size() == 9);
  CHECK(build_root_system(Family::B, 1, 2.0).size() == 1);
  CHECK(build_root_system(Family::A, 5, 2.0).gamma() == doctest::Approx(10.0));
  Multiplicities k;
  k.short_root = 2.0;
  k.long_root = 3.0;
  CHECK(build_root_system(Family::B, 2, 2.0, k).gamma() == doctest::Approx(2 * 2.0 + 2 * 3.0));
}

TEST_CASE("roots are positive against the chamber vector") {
  for (Family f : {Family::A, Family::B}) {
    const RootSystem s = build_root_system(f, 4, 3.0);
    Vec m(4);
    m << 1, 2, 3, 4;
    for (const auto& r : s.positive_roots()) CHECK(r.vec.dot(m) > 0);
    CHECK(chamber_interior(s, m));
  }
}

TEST_CASE("reflections are involutions preserving the root set") {
  const RootSystem s = build_root_system(Family::B, 3, 2.0);
  Vec x(3);
  x << 0.3, -1.2, 2.5;
  for (const auto& a : s.positive_roots()) {
    CHECK((reflect(a, reflect(a, x)) - x).norm() < 1e-14);
    CHECK(reflect(a, a.vec).isApprox(-a.vec));
    for (const auto& b : s.positive_roots()) {
      const Vec r = reflect(a, b.vec);
      bool found = false;
      for (const auto& c : s.positive_roots()) found |= r.isApprox(c.vec) || r.isApprox(-c.vec);
      CHECK(found);
    }
  }
}

TEST_CASE("weight is reflection invariant") {
  const RootSystem s = build_root_system(Family::A, 3, 4.0);
  Vec x(3);
  x << -0.4, 0.7, 1.9;
  for (const auto& a : s.positive_roots())
    CHECK(weight(s, reflect(a, x)) == doctest::Approx(weight(s, x)).epsilon(1e-12));
  CHECK(log_weight(s, x) == doctest::Approx(std::log(weight(s, x))));
}

TEST_CASE("regime and dimension errors") {
  CHECK_THROWS_AS(build_root_system(Family::A, 3, 1.0), RegimeError);
  CHECK_THROWS_AS(build_root_system(Family::A, 3, 0.5), RegimeError);
  CHECK_THROWS_AS(build_root_system(Family::A, 1, 2.0), DimensionError);
  CHECK_THROWS_AS(build_root_system(Family::B, 0, 2.0), DimensionError);
  Multiplicities k;
  k.short_root = 0.4;
  CHECK_THROWS_AS(build_root_system(Family::B, 2, 2.0, k), RegimeError);
}

TEST_CASE("mirror partner is an involution") {
  const RootSystem s = build_root_system(Family::A, 5, 2.0);
  for (std::size_t a = 0; a < s.size(); ++a) CHECK(mirror_partner(s, mirror_partner(s, a)) == a);
}

TEST_CASE("json round trip") {
  const RootSystem s = build_root_system(Family::B, 3, 5.0);
  const RootSystem t = root_system_from_json(to_json(s));
  CHECK(t.family() == Family::B);
  CHECK(t.rank() == 3);
  CHECK(t.beta() == 5.0);
  CHECK(t.size() == s.size());
}

TEST_CASE("weyl group orders and identity") {
  CHECK(GroupTable::enumerate(build_root_system(Family::A, 4, 2.0)).order() == 24);
  CHECK(GroupTable::enumerate(build_root_system(Family::B, 3, 2.0)).order() == 48);
  const GroupTable g = GroupTable::enumerate(build_root_system(Family::A, 3, 2.0));
  const auto& e = g.element(0);
  CHECK(e.perm == std::vector<int>{0, 1, 2});
  CHECK(g.sign(0) == 1);
  CHECK_THROWS_AS(GroupTable::enumerate(build_root_system(Family::A, 5, 2.0), 100), SizeError);
}

TEST_CASE("right multiplication tables are involutive permutations that flip the sign") {
  for (Family f : {Family::A, Family::B}) {
    const RootSystem s = build_root_system(f, 3, 2.0);
    const GroupTable g = GroupTable::enumerate(s);
    for (std::size_t a = 0; a < g.num_roots(); ++a) {
      const auto rho = g.right_mult(a);
      for (std::size_t i = 0; i < g.order(); ++i) {
        CHECK(rho[rho[i]] == static_cast<int>(i));
        CHECK(g.sign(rho[i]) == -g.sign(i));
      }
      const GroupElement refl = reflection_element(s.root(a), 3);
      const Vec x = (Vec(3) << 0.2, 1.1, -0.7).finished();
      CHECK((act(refl, x) - reflect(s.root(a), x)).norm() < 1e-14);
    }
  }
}

TEST_CASE("group multiplication agrees with composition") {
  const GroupTable g = GroupTable::enumerate(build_root_system(Family::B, 2, 2.0));
  for (std::size_t i = 0; i < g.order(); ++i)
    for (std::size_t j = 0; j < g.order(); ++j)
      CHECK(g.multiply(i, j) == g.index_of(compose(g.element(i), g.element(j))));
}
