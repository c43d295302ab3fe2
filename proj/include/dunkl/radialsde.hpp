#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dunkl/rng.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

// Drift of the radial SDE, (beta/2) sum_alpha k(alpha) alpha / (alpha.x).
// Throws WallError if some alpha.x == 0.
Vec drift(const RootSystem& system, const Vec& x);

// 1e-4 * min(1, 1/beta).
double default_dt(double beta);

// Observer for the sub-steps taken by RadialStepper. A hook may ask for a
// step to be halved (e.g. to cap a per-step jump probability).
class SubstepHook {
 public:
  virtual ~SubstepHook() = default;
  virtual bool needs_split(const Vec& /*x*/, double /*h*/) { return false; }
  // Called with the left end point of every accepted sub-step [t, t + h).
  virtual void on_substep(const Vec& /*x*/, double /*t*/, double /*h*/) {}
};

// Euler-Maruyama integrator for dX = dB + (beta/2) sum k alpha/(alpha.X) dt
// on the open Weyl chamber. A step that would leave the chamber is split in
// two halves with the Brownian increment refined by a Brownian bridge, up to
// max_halvings levels, after which StepError is thrown.
class RadialStepper {
 public:
  explicit RadialStepper(const RootSystem& system, int max_halvings = 20);

  // Advances x over [t, t + h).
  void step(Vec& x, double t, double h, Philox& rng, SubstepHook* hook = nullptr) const;

  // Advances x from t_from to t_to with steps of at most dt.
  void advance(Vec& x, double t_from, double t_to, double dt, Philox& rng, SubstepHook* hook = nullptr) const;

  // alpha.x for every positive root.
  Vec projections(const Vec& x) const { return roots_ * x; }
  const Eigen::MatrixXd& root_matrix() const { return roots_; }

 private:
  void step_rec(Vec& x, double t, double h, const Vec& dw, Philox& rng, SubstepHook* hook, int depth) const;

  Eigen::MatrixXd roots_;  // |R_+| x N, one root per row
  Vec half_beta_k_;
  int max_halvings_;
};

struct RadialPath {
  std::vector<double> times;
  std::vector<Vec> states;
  double beta = 0.0;
  Vec x0;
};

// Single path from an interior start x0. Reproducible for a fixed seed.
RadialPath simulate_radial(const RootSystem& system, const Vec& x0, double T, double dt, std::uint64_t seed,
                           std::size_t save_stride = 1);

// X(T) for `replicas` independent paths from x0; replica r uses stream r.
std::vector<Vec> radial_endpoints(const RootSystem& system, const Vec& x0, double T, double dt,
                                  std::size_t replicas, std::uint64_t seed);

enum class SamplerTag { Tridiagonal, Mcmc };
std::string to_string(SamplerTag tag);

// Draws from the law of X(1) started at the origin, density proportional to
// exp(-|x|^2/2) w_beta(x) on C_W. Points are stored column-wise.
struct StaticSample {
  Eigen::MatrixXd points;  // N x n
  double beta = 0.0;
  SamplerTag sampler_tag = SamplerTag::Tridiagonal;
  double acceptance_rate = 1.0;
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
};

// Exact draw by beta-ensemble tridiagonal models: Hermite type for A,
// Laguerre type (x_i = sqrt of eigenvalues) for B.
Vec draw_static_tridiagonal(const RootSystem& system, Philox& rng);

// Sample n points. Draw i of the tridiagonal backend uses stream i, so any
// prefix of a larger sample is reproduced exactly.
StaticSample sample_static(const RootSystem& system, std::size_t n, std::uint64_t seed,
                           SamplerTag sampler = SamplerTag::Tridiagonal);

// Random-walk Metropolis on C_W (proposal 0.3/sqrt(N), 1000 burn-in, thinning 10).
StaticSample sample_static_mcmc(const RootSystem& system, std::size_t n, std::uint64_t seed);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean with standard error; MCMC output uses 50 batch means.
MeanEstimate estimate_mean(std::span<const double> values, SamplerTag tag);

// E|X|^2 and its standard error; the target is N + beta * gamma.
MeanEstimate calibration_moment(const StaticSample& sample);
double calibration_target(const RootSystem& system);

// paths.csv: t, x_1..x_N.
void write_paths_csv(const std::filesystem::path& path, const std::string& hash, const RadialPath& radial);

}  // namespace dunkl
