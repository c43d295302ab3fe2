#include <cmath>

#include "doctest.h"
#include "dunkl/errors.hpp"
#include "dunkl/perturb.hpp"

using namespace dunkl;

namespace {

Vec grad(const RootSystem& s, const Vec& x) {
  Vec g = x;
  for (const auto& r : s.positive_roots()) g -= r.k * r.vec / r.vec.dot(x);
  return g;
}

}  // namespace

TEST_CASE("hessian against finite differences") {
  const RootSystem s = build_root_system(Family::B, 3, 2.0);
  const Vec x = peak_vector(s).z + (Vec(3) << 0.01, -0.02, 0.015).finished();
  const Eigen::MatrixXd H = hessian(s, x);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vec e = Vec::Zero(3);
    e[j] = h;
    const Vec col = (grad(s, x + e) - grad(s, x - e)) / (2 * h);
    CHECK((col - H.col(j)).norm() < 1e-7);
  }
  const RootSystem a2 = build_root_system(Family::A, 2, 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian(a2, peak_vector(a2).z));
  CHECK(es.eigenvalues()[0] == doctest::Approx(1.0));
  CHECK(es.eigenvalues()[1] == doctest::Approx(2.0));
}

TEST_CASE("two-particle coefficients") {
  const RootSystem s = build_root_system(Family::A, 2, 2.0);
  const Vec z = peak_vector(s).z;
  const Eigen::MatrixXd H = hessian(s, z);
  const CtildeTable c = ctilde(s, z, H, CtildeVariant::Corrected, IntegrationMethod::GaussQuadrature);
  const CtildeTable p = ctilde(s, z, H, CtildeVariant::Paper, IntegrationMethod::GaussQuadrature);
  CHECK(c.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.values[0] == doctest::Approx(53.0 / 48.0).epsilon(1e-12));
  CHECK(sum_rule_residual(s, c) < 1e-12);
  CHECK(sum_rule_residual(s, p) == doctest::Approx(5.0 / 192.0));
}

TEST_CASE("quadrature and monte carlo agree") {
  const RootSystem s = build_root_system(Family::A, 3, 2.0);
  const Vec z = peak_vector(s).z;
  const Eigen::MatrixXd H = hessian(s, z);
  const CtildeTable q = ctilde(s, z, H, CtildeVariant::Corrected, IntegrationMethod::GaussQuadrature);
  const CtildeTable m = ctilde(s, z, H, CtildeVariant::Corrected, IntegrationMethod::MonteCarlo, 400000, 6);
  for (std::size_t a = 0; a < q.values.size(); ++a) {
    CHECK(m.errors[a] > 0.0);
    CHECK(std::abs(m.values[a] - q.values[a]) < 4 * m.errors[a]);
  }
  const RootSystem a4 = build_root_system(Family::A, 4, 2.0);
  CHECK_THROWS_AS(ctilde(a4, peak_vector(a4).z, hessian(a4, peak_vector(a4).z), CtildeVariant::Corrected,
                         IntegrationMethod::GaussQuadrature),
                  QuadratureError);
}

TEST_CASE("first-order exponents") {
  const PerturbationReport r = perturbation_report(Family::A, 2, IntegrationMethod::GaussQuadrature);
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups[1].r0 == doctest::Approx(-0.5));
  CHECK(r.groups[1].r1.front() == doctest::Approx(-0.5));
  CHECK(predicted_r1(r.groups, 10.0) == doctest::Approx(-0.55));
  for (Family f : {Family::A, Family::B}) {
    const PerturbationReport q = perturbation_report(f, 3, IntegrationMethod::GaussQuadrature);
    CHECK(q.residual_corrected < 1e-10);
    for (const auto& g : q.groups)
      for (double v : g.r1) CHECK(v <= 1e-12);
  }
}

TEST_CASE("predictions against measured exponents") {
  const PerturbationReport r = perturbation_report(Family::A, 2, IntegrationMethod::GaussQuadrature);
  const auto rows = predict_vs_measured(r, {8.0, 16.0}, 200000, 3);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    const double exact = -row.beta / (2 * (row.beta - 1));
    CHECK(std::abs(row.r1_measured - exact) < 4 * row.stderr_);
    CHECK(std::abs(row.r1_predicted - exact) < 1.0 / (row.beta * row.beta));
  }
  std::vector<PredictionRow> synthetic;
  for (double b : {4.0, 8.0, 16.0}) synthetic.push_back({b, 0.0, 0.0, -0.5 - 0.7 / b, 0.0});
  CHECK(extrapolate_r1(synthetic) == doctest::Approx(-0.5));
}
