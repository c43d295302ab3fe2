#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/freezing.hpp"
#include "dunkl/mastereq.hpp"
#include "dunkl/weylgroup.hpp"

namespace dunkl {

// I + sum k zeta zeta^T / (zeta.z)^2.
Eigen::MatrixXd hessian(const RootSystem& system, const Vec& z);

// paper:     E[u^2 + (2u - A)^2 / 2]
// corrected: E[3u^2 - 2uA]
// with u = alpha.x/alpha.z, A = (1/3) sum k (zeta.x/zeta.z)^3, x ~ N(0, H^{-1}).
enum class CtildeVariant { Paper, Corrected };
enum class IntegrationMethod { GaussQuadrature, MonteCarlo };

std::string to_string(CtildeVariant variant);
CtildeVariant ctilde_variant_from_string(const std::string& name);

struct CtildeTable {
  CtildeVariant variant = CtildeVariant::Corrected;
  IntegrationMethod method = IntegrationMethod::GaussQuadrature;
  std::vector<double> values;
  std::vector<double> errors;   // MC standard errors; zero for quadrature
  double sum_rule = 0.0;        // sum |alpha|^2 k C / (4 (alpha.z)^2)
  double sum_rule_stderr = 0.0;
};

// Tensor Gauss-Hermite with 20 nodes per axis (N <= 3, else QuadratureError)
// or Monte Carlo with n samples.
CtildeTable ctilde(const RootSystem& system, const Vec& z, const Eigen::MatrixXd& H, CtildeVariant variant,
                   IntegrationMethod method, std::size_t n = 1000000, std::uint64_t seed = 0);

// |sum_rule - gamma / 4|.
double sum_rule_residual(const RootSystem& system, const CtildeTable& table);

// w_alpha = |alpha|^2 k C(alpha) / (4 (alpha.z)^2).
std::vector<double> perturbation_weights(const RootSystem& system, const Vec& z, const CtildeTable& table);

struct FirstOrderGroup {
  double r0 = 0.0;
  std::size_t multiplicity = 0;
  std::vector<double> r1;  // descending
};

// Eigenvalues of V = sum w S_alpha - (sum w) I projected on each eigenspace
// of the frozen operator.
std::vector<FirstOrderGroup> first_order_exponents(const SpectrumResult& frozen, const std::vector<double>& weights,
                                                   const GroupTable& table);

// r1(beta) = r0_1 + max(r1_1) / beta for the least negative nonzero group.
double predicted_r1(const std::vector<FirstOrderGroup>& groups, double beta);

struct PerturbationReport {
  Family family = Family::A;
  int rank = 0;
  PeakVector peak;
  Eigen::MatrixXd H;
  CtildeTable paper;
  CtildeTable corrected;
  double residual_paper = 0.0;
  double residual_corrected = 0.0;
  std::vector<FirstOrderGroup> groups;
  double gamma = 0.0;
};

PerturbationReport perturbation_report(Family family, int n, IntegrationMethod method, std::size_t samples = 1000000,
                                       std::uint64_t seed = 0);

struct PredictionRow {
  double beta = 0.0;
  double r1_zeroth = 0.0;
  double r1_predicted = 0.0;
  double r1_measured = 0.0;
  double stderr_ = 0.0;
};

// r1 from the master operator on Monte Carlo rates against r0 + r1/beta.
std::vector<PredictionRow> predict_vs_measured(const PerturbationReport& report, const std::vector<double>& betas,
                                               std::size_t nsamples, std::uint64_t seed);

// Intercept a of a least-squares fit r1 = a + b/beta.
double extrapolate_r1(const std::vector<PredictionRow>& rows);

nlohmann::json to_json(const PerturbationReport& report, const std::vector<PredictionRow>& predictions);

}  // namespace dunkl
