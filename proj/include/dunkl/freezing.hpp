#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dunkl/jumprates.hpp"
#include "dunkl/mastereq.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

// Minimiser of |x|^2/2 - sum k log(alpha.x) on the open chamber, i.e. the
// fixed point z = sum k alpha/(alpha.z).
struct PeakVector {
  Vec z;
  double residual = 0.0;   // sup |z - sum k alpha/(alpha.z)|
  double objective = 0.0;
  int iterations = 0;
  double r_star = 0.0;     // min alpha.z / (|alpha| sqrt(gamma))
};

// Damped Newton with backtracking line search; ConvergenceError after 200 steps.
PeakVector peak_vector(const RootSystem& system);

// Zeros of the physicists' Hermite polynomial H_N, ascending.
Vec hermite_zeros(int n);

struct GaussHermiteRule {
  Vec nodes;
  Vec weights;  // for the weight exp(-x^2), summing to sqrt(pi)
};
GaussHermiteRule gauss_hermite(int n);

// max_i |z_i - sum_{j != i} 1/(z_i - z_j)| and max_i |z_i - sum_{j != i} 2/(z_i - z_j)^3|.
std::pair<double, double> hermite_identity_residuals(const Vec& zeros);

// |alpha|^2 k / (4 (alpha.z)^2) per root.
std::vector<double> frozen_rates(const RootSystem& system, const Vec& z);
RateTable frozen_rate_table(const RootSystem& system, const PeakVector& peak);

struct PFSpectrumReport {
  int n = 0;
  Vec z;
  std::vector<double> rates;
  SpectrumResult spectrum;
  std::size_t half_multiplicity = 0;  // multiplicity of -1/2
  double min_eigenvalue = 0.0;
  double symmetry_deviation = 0.0;    // vs reflection about -N(N-1)/8
};

// Frozen type-A operator built directly on permutation tuples:
// (1/2) sum_{i<j} f(tau o (i j))/(z_j - z_i)^2 - N(N-1)/8 f(tau). N <= 7.
PFSpectrumReport pf_spectrum(int n);

using CMatrix = Eigen::MatrixXcd;
using SparseC = Eigen::SparseMatrix<std::complex<double>>;

// Single-site generators J^{(j,l)} with 1-based labels. The list excludes
// the zero generator (N, N).
struct SuGenerator {
  int j = 0;
  int l = 0;
  CMatrix matrix;
};
std::vector<SuGenerator> su_generators(int n);

// f^{abc} = 2 Tr([J_a, J_b] J_c), so that [J_a, J_b] = sum_c f^{abc} J_c.
std::vector<std::complex<double>> structure_constants(const std::vector<SuGenerator>& gens);

// max |P - (I/N + 2 sum J x J)| on the two-site space. N <= 8.
double verify_exchange_identity(int n);

struct LadderReport {
  double commutator_K = 0.0;  // max over labels of |[M, K] - L/2|
  double commutator_L = 0.0;  // max over labels of |[M, L] - K/2|
  double structure_antisymmetry = 0.0;
  double shift_residual = 0.0;  // M (K +- L) phi = (r +- 1/2)(K +- L) phi on permutation eigenvectors
};

// Operators on the N^N chain space, base-N digit ordering. N in {2, 3, 4}.
LadderReport verify_ladder_commutators(int n);

struct SubspaceEntry {
  int j = 0;
  int l = 0;
  double leak = 0.0;  // max over |rho> of |(1 - Pi)(K +- L)|rho>| / |(K +- L)|rho>|
  bool stays = false;
};

struct SubspaceReport {
  std::vector<SubspaceEntry> entries;
  std::size_t lowering_count = 0;  // labels whose K - L maps the uniform vector to a -1/2 eigenvector
  double lowering_residual = 0.0;
  bool verdicts_ok = false;        // j = l stays and j != l leaves for every label
};

SubspaceReport verify_ladder_subspace(int n);

nlohmann::json to_json(const PFSpectrumReport& report);
nlohmann::json to_json(const SubspaceReport& report);

}  // namespace dunkl
