#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dunkl/jumprates.hpp"
#include "dunkl/radialsde.hpp"
#include "dunkl/weylgroup.hpp"

namespace dunkl {

struct JumpEvent {
  double time = 0.0;
  std::size_t root = 0;
  std::int64_t group_index = 0;  // rho right after the jump; -1 past 2^62
};

// rho(t) starts at the identity (index 0) and is right-multiplied by the
// reflection of each recorded root.
struct JumpTrajectory {
  Vec x0;
  std::vector<JumpEvent> events;
  double T_final = 0.0;

  std::size_t count() const { return events.size(); }
  std::int64_t group_at(double t) const;
};

struct DunklPath {
  RadialPath radial;
  JumpTrajectory jumps;
};

// Jumps are Bernoulli per sub-step with probability 1 - exp(-Lambda(x) h);
// sub-steps are halved until Lambda(x) h <= 0.1.
inline constexpr double kMaxJumpProbability = 0.1;

DunklPath simulate_dunkl(const RootSystem& system, const GroupTable& table, const Vec& x0, double T, double dt,
                         std::uint64_t seed, std::size_t save_stride = 1);

// Without a table rho is kept as a signed permutation and indexed by
// lexicographic_rank, which agrees with the table order.
DunklPath simulate_dunkl(const RootSystem& system, const Vec& x0, double T, double dt, std::uint64_t seed,
                         std::size_t save_stride = 1);

// X(t) = rho(t) X_hat(t) on the saved grid of the radial path.
std::vector<Vec> reconstruct_full_path(const DunklPath& path, const GroupTable& table);
std::vector<Vec> reconstruct_full_path(const DunklPath& path, const RootSystem& system);

struct JumpCountRecord {
  std::vector<double> times;                       // times[0] = t0
  std::vector<std::vector<std::size_t>> counts;    // counts[r][i] = N(times[i]) - N(t0)
  std::size_t replicas() const { return counts.size(); }
};

// Jump counts from the origin: X_hat(t0) is a static draw scaled by sqrt(t0),
// then the radial process runs to times.back(). Replica r uses stream r.
JumpCountRecord count_jumps_from_origin(const RootSystem& system, double t0, const std::vector<double>& times,
                                        std::size_t replicas, double dt, std::uint64_t seed);

struct JumpCountReport {
  double t0 = 0.0;
  double t = 0.0;
  std::size_t replicas = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double predicted_mean = 0.0;     // Lambda(1|0) log(t/t0)
  double dispersion = 0.0;         // sum (n - mean)^2 / mean
  double dispersion_pvalue = 1.0;  // two-sided, chi-square with replicas-1 dof
  double gof_pvalue = 1.0;         // Pearson test against Poisson(predicted_mean)
};

// Statistics of N(times[i]) - N(t0) for the grid point nearest to t.
JumpCountReport jump_count_stats(const JumpCountRecord& record, double lambda_at_1, double t);

enum class RateMode { ClosedForm, Simulate };
std::string to_string(RateMode mode);
RateMode rate_mode_from_string(const std::string& name);

struct SimulateOptions {
  std::size_t replicas = 2000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
};

// Start points of norm `radius`: centred unit spacing for A, (1..N) for B.
Vec default_start(Family family, int n, double radius);

// Lambda(N | x0) / N for k == 1. Closed form uses x0 = 0; simulate estimates
// Lambda(1 | x0/sqrt N) / N^2 from an SDE ensemble.
double per_particle_rate(Family family, int n, double beta, const Vec& x0, RateMode mode,
                         const SimulateOptions& options = {});

// beta / (c (beta - 1)) with c = 8 for A and 4 for B.
double per_particle_limit(Family family, double beta);

struct PhaseRow {
  int n = 0;
  double beta = 0.0;
  double rate_per_particle = 0.0;
  double theory = 0.0;
  RateMode mode = RateMode::ClosedForm;
};

std::vector<PhaseRow> phase_sweep(Family family, double beta, int n_min, int n_max, RateMode mode,
                                  double start_radius = 1.0, const SimulateOptions& options = {});

void write_trajectory_csv(const std::filesystem::path& path, const std::string& hash, const RootSystem& system,
                          const JumpTrajectory& trajectory);
void write_phase_csv(const std::filesystem::path& path, const std::string& hash, const std::vector<PhaseRow>& rows);

}  // namespace dunkl
