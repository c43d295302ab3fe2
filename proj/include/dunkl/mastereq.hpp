#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dunkl/jumprates.hpp"
#include "dunkl/weylgroup.hpp"

namespace dunkl {

// M = sum_alpha lambda_alpha S_alpha - Lambda I with (S_alpha f)(tau) = f(tau sigma_alpha).
struct MasterOperator {
  Family family = Family::A;
  int rank = 0;
  Eigen::MatrixXd M;
  std::vector<double> lambdas;
  double Lambda = 0.0;
  std::vector<std::vector<int>> right_mult;
  std::vector<int> signs;

  std::size_t dim() const { return static_cast<std::size_t>(M.rows()); }
};

// sum_alpha lambda_alpha S_alpha - (sum lambda) I.
Eigen::MatrixXd generator_matrix(const GroupTable& table, std::span<const double> lambdas);

MasterOperator build_master(const RateTable& rates, const GroupTable& table);
MasterOperator build_master(const GroupTable& table, const std::vector<double>& lambdas);

struct EigenGroup {
  double value = 0.0;
  std::size_t first = 0;
  std::size_t multiplicity = 0;
};

// Eigenvalues in descending order with orthonormal eigenvectors (columns).
struct SpectrumResult {
  Vec values;
  Eigen::MatrixXd vectors;
  std::vector<EigenGroup> groups;
  std::vector<std::size_t> group_of;

  // Least negative nonzero exponent.
  double r1() const;
};

SpectrumResult spectrum(const Eigen::MatrixXd& M, double group_tol = 1e-8);
SpectrumResult spectrum(const MasterOperator& op);

// max_i || M phi_i - r_i phi_i ||.
double eigen_residual(const Eigen::MatrixXd& M, const SpectrumResult& s);

Vec uniform_distribution(std::size_t dim);
Vec delta_distribution(std::size_t dim, std::size_t tau);

// P(t) = sum_i <phi_i, P0> (t/t0)^{r_i} phi_i.
Vec solve_power_law(const SpectrumResult& s, const Vec& P0, double t0, double t);

struct DistributionSeries {
  std::vector<double> times;
  std::vector<Vec> values;
};

DistributionSeries power_law_series(const SpectrumResult& s, const Vec& P0, double t0, const std::vector<double>& times);

// Jump chain under s = log(t/t0): homogeneous with generator M, exit rate
// Lambda. Replica r draws from stream r. Returns empirical marginals.
DistributionSeries simulate_chain(const MasterOperator& op, const Vec& P0, double t0, const std::vector<double>& times,
                                  std::size_t replicas, std::uint64_t seed);

using RateFunction = std::function<std::vector<double>(double t)>;

// dP/dt = M(t) P with M(t) built from rate_fn(t), integrated in log t by an
// adaptive Dormand-Prince scheme (abs and rel tolerance `tol`).
DistributionSeries integrate_inhomogeneous(const GroupTable& table, const RateFunction& rate_fn, const Vec& P0,
                                           double t0, const std::vector<double>& times, double tol = 1e-10);

// log-spaced grid of `points` times from t0 to T inclusive.
std::vector<double> log_grid(double t0, double T, std::size_t points);

struct ExponentFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double log_amplitude = 0.0;
  std::size_t points = 0;
};

// Least-squares slope of log ||P(t) - uniform||_inf against log t over the
// last tail_fraction of the log-time range. InsufficientRangeError if the
// series spans less than two decades or carries no signal.
ExponentFit fit_relaxation_exponent(const DistributionSeries& series, double tail_fraction = 0.5);

void write_spectrum_csv(const std::filesystem::path& path, const std::string& hash, const SpectrumResult& s);

// relax.csv rows for every (time, tau).
void write_relax_csv(const std::filesystem::path& path, const std::string& hash, const DistributionSeries& empirical,
                     const DistributionSeries& theory);

}  // namespace dunkl
