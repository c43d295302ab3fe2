#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "dunkl/errors.hpp"
#include "dunkl/jumprates.hpp"

using namespace dunkl;

TEST_CASE("closed-form totals") {
  CHECK(total_rate_closed_form(build_root_system(Family::A, 2, 4.0)) == doctest::Approx(1.0 / 3.0));
  CHECK(total_rate_closed_form(build_root_system(Family::B, 3, 2.0)) == doctest::Approx(4.5));
  Multiplicities k;
  k.root = 2.0;
  CHECK_THROWS_AS(total_rate_closed_form(build_root_system(Family::A, 2, 4.0, k)), UnsupportedMultiplicity);
}

TEST_CASE("rate integrand") {
  const RootSystem s = build_root_system(Family::A, 2, 4.0);
  const Vec x = (Vec(2) << 0.0, 2.0).finished();
  CHECK(rate_integrand(s, s.root(0), x) == doctest::Approx(4.0 * 2.0 / (4.0 * 4.0)));
}

TEST_CASE("origin estimate matches the closed form and sums its entries") {
  const RootSystem s = build_root_system(Family::B, 2, 6.0);
  const RateTable t = estimate_rates_origin(s, 200000, 8);
  double sum = 0.0;
  for (const auto& e : t.entries) sum += e.lambda;
  CHECK(sum == t.total);
  CHECK(std::abs(t.total - total_rate_closed_form(s)) < 4 * t.total_stderr);
  CHECK_FALSE(t.variance_warning);
  CHECK(estimate_rates_origin(build_root_system(Family::A, 2, 2.0), 1000, 1).variance_warning);
}

TEST_CASE("1/t scaling") {
  const RootSystem s = build_root_system(Family::A, 3, 4.0);
  const RateTable t = estimate_rates_origin(s, 1000, 2);
  const auto r = rate_at_time(t, 4.0);
  for (std::size_t a = 0; a < r.size(); ++a) CHECK(r[a] == t.entries[a].lambda / 4.0);
  const RateTable t2 = estimate_rates_from(s, Vec::Zero(3), 2.0, 1000, 1e-3, 2);
  for (std::size_t a = 0; a < r.size(); ++a) CHECK(t2.entries[a].lambda == t.entries[a].lambda / 2.0);
}

// For A_1 the gap r = (x2 - x1)/sqrt2 is a Bessel process of index nu = (beta - 1)/2
// and the total rate is beta/4 E[1/r^2].
TEST_CASE("rates away from the origin against the Bessel transition density") {
  const double beta = 8.0;
  const double a = 0.6;
  const double r0 = std::sqrt(2.0) * a;
  const double nu = 0.5 * (beta - 1);
  auto density = [&](double r) {
    return std::pow(r / r0, nu) * r * std::exp(-0.5 * (r * r + r0 * r0)) * std::cyl_bessel_i(nu, r * r0);
  };
  using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double norm = Q::integrate(density, 0.0, 30.0, 10, 1e-13);
  const double inv2 = Q::integrate([&](double r) { return density(r) / (r * r); }, 0.0, 30.0, 10, 1e-13);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  const double exact = beta / 4.0 * inv2;

  const RootSystem s = build_root_system(Family::A, 2, beta);
  const RateTable t = estimate_rates_from(s, (Vec(2) << -a, a).finished(), 1.0, 10000, 1e-3, 17);
  CHECK(t.sampler == "sde");
  CHECK(std::abs(t.total - exact) < 4 * t.total_stderr);
}

TEST_CASE("ray interpolation and extrapolation") {
  const auto grid = ray_grid(0.1, 1.0, 4);
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 0.0);
  CHECK(grid[1] == doctest::Approx(0.1));
  CHECK(grid.back() == doctest::Approx(1.0));
  const RootSystem s = build_root_system(Family::A, 2, 6.0);
  const Vec x0 = (Vec(2) << -1.0, 1.0).finished();
  const RateRay ray = build_rate_ray(s, x0, grid, 2000, 2e-3, 5);
  const double norm = x0.norm();
  const auto at_origin = rate_at_time(ray, 1e12, x0);
  CHECK(at_origin[0] == doctest::Approx(ray.tables[0].entries[0].lambda / 1e12).epsilon(1e-5));
  const double t_last = (norm / grid.back()) * (norm / grid.back());
  const auto last = rate_at_time(ray, t_last, x0);
  CHECK(last[0] == doctest::Approx(ray.tables.back().entries[0].lambda / t_last));
  CHECK_THROWS_AS(rate_at_time(ray, 0.5 * t_last, x0), ExtrapolationError);
}

TEST_CASE("json round trip and cache replay") {
  const RootSystem s = build_root_system(Family::B, 2, 4.0);
  const RateTable t = estimate_rates_origin(s, 2000, 3);
  const RateTable back = rate_table_from_json(to_json(t));
  REQUIRE(back.entries.size() == t.entries.size());
  for (std::size_t a = 0; a < t.entries.size(); ++a) CHECK(back.entries[a].lambda == t.entries[a].lambda);
  CHECK(back.total == t.total);
  CHECK(back.total_closed_form == t.total_closed_form);

  const auto dir = std::filesystem::temp_directory_path() / "dunkl_cache_test";
  std::filesystem::remove_all(dir);
  const RateCache cache(dir);
  const RateTable first = cache.origin(s, 2000, 3);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
  const RateTable second = cache.origin(s, 2000, 3);
  CHECK(second.total == first.total);
  CHECK(first.total == t.total);
  cache.origin(s, 2000, 4);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 2);
  std::filesystem::remove_all(dir);
}
