#include <cmath>

#include "doctest.h"
#include "dunkl/errors.hpp"
#include "dunkl/freezing.hpp"
#include "dunkl/mastereq.hpp"

using namespace dunkl;

TEST_CASE("two-state operator") {
  const GroupTable g = GroupTable::enumerate(build_root_system(Family::A, 2, 4.0));
  const MasterOperator op = build_master(g, {1.0 / 3.0});
  CHECK(op.M(0, 0) == doctest::Approx(-1.0 / 3.0));
  CHECK(op.M(1, 0) == doctest::Approx(1.0 / 3.0));
  const SpectrumResult s = spectrum(op);
  CHECK(s.values[0] == doctest::Approx(0.0));
  CHECK(s.values[1] == doctest::Approx(-2.0 / 3.0));
  CHECK(s.r1() == doctest::Approx(-2.0 / 3.0));
  for (double t : {1.0, 2.0, 10.0}) {
    const Vec p = solve_power_law(s, delta_distribution(2, 0), 1.0, t);
    CHECK(p[0] == doctest::Approx(0.5 + 0.5 * std::pow(t, -2.0 / 3.0)));
    CHECK(p.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("generator structure for random rates") {
  const RootSystem sys = build_root_system(Family::B, 3, 2.0);
  const GroupTable g = GroupTable::enumerate(sys);
  std::vector<double> l;
  for (std::size_t a = 0; a < sys.size(); ++a) l.push_back(0.1 + 0.05 * a);
  const Eigen::MatrixXd M = generator_matrix(g, l);
  CHECK(M.colwise().sum().cwiseAbs().maxCoeff() < 1e-14);
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const SpectrumResult s = spectrum(M);
  CHECK(eigen_residual(M, s) < 1e-12);
  CHECK(s.groups.front().multiplicity == 1);
  double lam = 0;
  for (double v : l) lam += v;
  CHECK(s.values[s.values.size() - 1] == doctest::Approx(-2 * lam));
}

TEST_CASE("mismatched tables") {
  const RootSystem a3 = build_root_system(Family::A, 3, 4.0);
  const RateTable t = estimate_rates_origin(a3, 100, 1);
  CHECK_THROWS_AS(build_master(t, GroupTable::enumerate(build_root_system(Family::A, 4, 4.0))), MismatchError);
  const RateTable moved = estimate_rates_from(a3, (Vec(3) << -1, 0, 1).finished(), 1.0, 20, 1e-3, 1);
  CHECK_THROWS_AS(build_master(moved, GroupTable::enumerate(a3)), MismatchError);
}

TEST_CASE("inhomogeneous integration reproduces the power law") {
  const RootSystem sys = build_root_system(Family::A, 3, 2.0);
  const GroupTable g = GroupTable::enumerate(sys);
  const RateTable frozen = frozen_rate_table(sys, peak_vector(sys));
  const auto times = log_grid(0.5, 500.0, 13);
  CHECK(times.front() == 0.5);
  CHECK(times.back() == doctest::Approx(500.0));
  const Vec P0 = delta_distribution(6, 2);
  const auto num = integrate_inhomogeneous(g, [&](double t) { return rate_at_time(frozen, t); }, P0, 0.5, times);
  const auto exact = power_law_series(spectrum(build_master(frozen, g)), P0, 0.5, times);
  for (std::size_t i = 0; i < times.size(); ++i) CHECK((num.values[i] - exact.values[i]).norm() < 1e-8);
}

TEST_CASE("relaxation exponent fit") {
  const RootSystem sys = build_root_system(Family::A, 3, 2.0);
  const GroupTable g = GroupTable::enumerate(sys);
  const SpectrumResult s = spectrum(build_master(frozen_rate_table(sys, peak_vector(sys)), g));
  const auto series = power_law_series(s, delta_distribution(6, 0), 1.0, log_grid(1.0, 1e8, 81));
  const ExponentFit fit = fit_relaxation_exponent(series);
  CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(1e-2));
  CHECK(fit.ci_low <= fit.exponent);
  CHECK(fit.ci_high >= fit.exponent);
  const auto short_series = power_law_series(s, delta_distribution(6, 0), 1.0, log_grid(1.0, 10.0, 11));
  CHECK_THROWS_AS(fit_relaxation_exponent(short_series), InsufficientRangeError);
  const auto flat = power_law_series(s, uniform_distribution(6), 1.0, log_grid(1.0, 1e4, 11));
  CHECK_THROWS_AS(fit_relaxation_exponent(flat), InsufficientRangeError);
}

TEST_CASE("chain simulation") {
  const GroupTable g = GroupTable::enumerate(build_root_system(Family::A, 3, 4.0));
  const MasterOperator op = build_master(g, {0.3, 0.2, 0.3});
  const auto times = log_grid(1.0, 20.0, 5);
  const auto a = simulate_chain(op, delta_distribution(6, 0), 1.0, times, 20000, 4);
  const auto b = simulate_chain(op, delta_distribution(6, 0), 1.0, times, 20000, 4);
  const auto exact = power_law_series(spectrum(op), delta_distribution(6, 0), 1.0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(a.values[i] == b.values[i]);
    CHECK(a.values[i].sum() == doctest::Approx(1.0));
    for (Eigen::Index k = 0; k < 6; ++k) {
      const double p = exact.values[i][k];
      CHECK(std::abs(a.values[i][k] - p) <= 4.5 * std::sqrt(p * (1 - p) / 20000) + 1e-12);
    }
  }
}
