#include "dunkl/dunklsim.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "dunkl/errors.hpp"
#include "dunkl/io.hpp"

namespace dunkl {

std::int64_t JumpTrajectory::group_at(double t) const {
  std::int64_t g = 0;
  for (const auto& e : events) {
    if (e.time > t) break;
    g = e.group_index;
  }
  return g;
}

namespace {

std::vector<GroupElement> reflections(const RootSystem& system) {
  std::vector<GroupElement> out;
  out.reserve(system.size());
  for (std::size_t a = 0; a < system.size(); ++a) out.push_back(reflection_element(system.root(a), system.rank()));
  return out;
}

GroupElement identity_element(int n) {
  GroupElement g;
  g.perm.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.perm[static_cast<std::size_t>(i)] = i;
  g.signs.assign(static_cast<std::size_t>(n), 1);
  return g;
}

// Samples jumps along the radial path. With tracking on it also records rho,
// indexed through the table when one is given.
class JumpHook : public SubstepHook {
 public:
  JumpHook(const RootSystem& system, const RadialStepper& stepper, Philox& rng, bool track,
           const GroupTable* table = nullptr)
      : stepper_(stepper),
        rng_(rng),
        track_(track),
        table_(table),
        family_(system.family()),
        coef_(static_cast<Eigen::Index>(system.size())) {
    for (std::size_t a = 0; a < system.size(); ++a) {
      const Root& r = system.root(a);
      coef_[static_cast<Eigen::Index>(a)] = system.beta() * r.k * r.norm_sq / 4.0;
    }
    if (track_ && !table_) {
      reflections_ = reflections(system);
      rho_ = identity_element(system.rank());
    }
  }

  bool needs_split(const Vec& x, double h) override { return total_rate(x) * h > kMaxJumpProbability; }

  void on_substep(const Vec& x, double t, double h) override {
    const Vec rates = coef_.array() / (stepper_.projections(x).array().square());
    const double lambda = rates.sum();
    if (rng_.uniform() >= -std::expm1(-lambda * h)) return;
    double u = rng_.uniform() * lambda;
    Eigen::Index a = 0;
    while (a + 1 < rates.size() && u >= rates[a]) u -= rates[a++];
    ++count_;
    if (!track_) return;
    const auto root = static_cast<std::size_t>(a);
    if (table_) {
      group_ = table_->right_mult(root)[static_cast<std::size_t>(group_)];
    } else {
      rho_ = compose(rho_, reflections_[root]);
      group_ = lexicographic_rank(rho_, family_);
    }
    events_.push_back({t + 0.5 * h, root, group_});
  }

  std::size_t count() const { return count_; }
  std::vector<JumpEvent>& events() { return events_; }

 private:
  double total_rate(const Vec& x) const { return (coef_.array() / stepper_.projections(x).array().square()).sum(); }

  const RadialStepper& stepper_;
  Philox& rng_;
  bool track_;
  const GroupTable* table_;
  Family family_;
  Vec coef_;
  std::vector<GroupElement> reflections_;
  GroupElement rho_;
  std::size_t count_ = 0;
  std::int64_t group_ = 0;
  std::vector<JumpEvent> events_;
};

}  // namespace

namespace {

DunklPath run_dunkl(const RootSystem& system, const GroupTable* table, const Vec& x0, double T, double dt,
                    std::uint64_t seed, std::size_t save_stride) {
  if (x0.size() != system.rank()) throw MismatchError("start point dimension does not match the rank");
  if (!(T >= 0.0)) throw ConfigError("T must be nonnegative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!chamber_interior(system, x0)) throw WallError("Dunkl paths must start strictly inside the chamber");
  save_stride = std::max<std::size_t>(save_stride, 1);

  DunklPath out;
  out.radial.beta = system.beta();
  out.radial.x0 = x0;
  out.radial.times.push_back(0.0);
  out.radial.states.push_back(x0);
  out.jumps.x0 = x0;
  out.jumps.T_final = T;
  if (T == 0.0) return out;

  RadialStepper stepper(system);
  Philox rng(seed, 0);
  JumpHook hook(system, stepper, rng, true, table);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = T / static_cast<double>(steps);
  Vec x = x0;
  for (std::size_t s = 0; s < steps; ++s) {
    stepper.step(x, static_cast<double>(s) * h, h, rng, &hook);
    if ((s + 1) % save_stride == 0 || s + 1 == steps) {
      out.radial.times.push_back(s + 1 == steps ? T : static_cast<double>(s + 1) * h);
      out.radial.states.push_back(x);
    }
  }
  out.jumps.events = std::move(hook.events());
  return out;
}

}  // namespace

DunklPath simulate_dunkl(const RootSystem& system, const GroupTable& table, const Vec& x0, double T, double dt,
                         std::uint64_t seed, std::size_t save_stride) {
  if (table.family() != system.family() || table.rank() != system.rank() || table.num_roots() != system.size())
    throw MismatchError("group table does not match the root system");
  return run_dunkl(system, &table, x0, T, dt, seed, save_stride);
}

DunklPath simulate_dunkl(const RootSystem& system, const Vec& x0, double T, double dt, std::uint64_t seed,
                         std::size_t save_stride) {
  return run_dunkl(system, nullptr, x0, T, dt, seed, save_stride);
}

std::vector<Vec> reconstruct_full_path(const DunklPath& path, const GroupTable& table) {
  std::vector<Vec> out;
  out.reserve(path.radial.states.size());
  std::size_t next = 0;
  std::int64_t g = 0;
  for (std::size_t s = 0; s < path.radial.states.size(); ++s) {
    const double t = path.radial.times[s];
    while (next < path.jumps.events.size() && path.jumps.events[next].time <= t) g = path.jumps.events[next++].group_index;
    out.push_back(act(table.element(static_cast<std::size_t>(g)), path.radial.states[s]));
  }
  return out;
}

std::vector<Vec> reconstruct_full_path(const DunklPath& path, const RootSystem& system) {
  const auto refl = reflections(system);
  std::vector<Vec> out;
  out.reserve(path.radial.states.size());
  std::size_t next = 0;
  GroupElement rho = identity_element(system.rank());
  for (std::size_t s = 0; s < path.radial.states.size(); ++s) {
    const double t = path.radial.times[s];
    while (next < path.jumps.events.size() && path.jumps.events[next].time <= t) {
      const std::size_t a = path.jumps.events[next++].root;
      if (a >= refl.size()) throw MismatchError("jump root outside the root system");
      rho = compose(rho, refl[a]);
    }
    out.push_back(act(rho, path.radial.states[s]));
  }
  return out;
}

JumpCountRecord count_jumps_from_origin(const RootSystem& system, double t0, const std::vector<double>& times,
                                        std::size_t replicas, double dt, std::uint64_t seed) {
  if (!(t0 > 0.0)) throw ConfigError("counting from the origin needs t0 > 0");
  if (times.empty() || times.front() != t0) throw ConfigError("time grid must start at t0");
  if (!std::is_sorted(times.begin(), times.end())) throw ConfigError("time grid must be nondecreasing");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");

  JumpCountRecord record;
  record.times = times;
  record.counts.assign(replicas, std::vector<std::size_t>(times.size(), 0));
  const RadialStepper stepper(system);
  const double scale = std::sqrt(t0);
  parallel_for(replicas, [&](std::size_t r) {
    Philox rng(seed, r);
    Vec x = scale * draw_static_tridiagonal(system, rng);
    JumpHook hook(system, stepper, rng, false);
    for (std::size_t i = 1; i < times.size(); ++i) {
      stepper.advance(x, times[i - 1], times[i], dt, rng, &hook);
      record.counts[r][i] = hook.count();
    }
  });
  return record;
}

JumpCountReport jump_count_stats(const JumpCountRecord& record, double lambda_at_1, double t) {
  JumpCountReport rep;
  const auto& times = record.times;
  if (times.empty()) throw ConfigError("empty jump count record");
  std::size_t idx = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[idx] - t)) idx = i;
  rep.t0 = times.front();
  rep.t = times[idx];
  rep.replicas = record.replicas();
  rep.predicted_mean = lambda_at_1 * std::log(rep.t / rep.t0);
  const std::size_t n = rep.replicas;
  if (n < 2) return rep;

  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (const auto& c : record.counts) sum += static_cast<double>(c[idx]);
  rep.mean = sum / dn;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const auto& c : record.counts) {
    const double d = static_cast<double>(c[idx]) - rep.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  rep.variance = m2 / (dn - 1.0);
  rep.mean_stderr = std::sqrt(rep.variance / dn);
  const double mu2 = m2 / dn;
  rep.variance_stderr = std::sqrt(std::max(m4 / dn - mu2 * mu2, 0.0) / dn);

  if (rep.mean > 0.0) {
    rep.dispersion = m2 / rep.mean;
    const boost::math::chi_squared chi(dn - 1.0);
    const double cdf = boost::math::cdf(chi, rep.dispersion);
    rep.dispersion_pvalue = std::min(1.0, 2.0 * std::min(cdf, 1.0 - cdf));
  }

  if (rep.predicted_mean > 0.0) {
    // Pearson bins k = 0, 1, ... while the expected count stays >= 5; the
    // last bin collects the tail.
    const boost::math::poisson_distribution<double> pois(rep.predicted_mean);
    std::vector<double> expected;
    double covered = 0.0;
    for (std::size_t k = 0;; ++k) {
      const double p = boost::math::pdf(pois, static_cast<double>(k));
      if (dn * p < 5.0 || dn * (1.0 - covered - p) < 5.0) break;
      expected.push_back(dn * p);
      covered += p;
    }
    expected.push_back(dn * (1.0 - covered));
    std::vector<double> observed(expected.size(), 0.0);
    for (const auto& c : record.counts) observed[std::min<std::size_t>(c[idx], expected.size() - 1)] += 1.0;
    if (expected.size() >= 2) {
      double stat = 0.0;
      for (std::size_t b = 0; b < expected.size(); ++b)
        stat += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
      const boost::math::chi_squared chi(static_cast<double>(expected.size() - 1));
      rep.gof_pvalue = boost::math::cdf(boost::math::complement(chi, stat));
    }
  }
  return rep;
}

std::string to_string(RateMode mode) { return mode == RateMode::ClosedForm ? "closed_form" : "simulate"; }

RateMode rate_mode_from_string(const std::string& name) {
  if (name == "closed_form") return RateMode::ClosedForm;
  if (name == "simulate") return RateMode::Simulate;
  throw ConfigError("unknown rate mode '" + name + "'");
}

Vec default_start(Family family, int n, double radius) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = family == Family::A ? i - 0.5 * (n - 1) : i + 1.0;
  if (radius == 0.0) return Vec::Zero(n);
  return x * (radius / x.norm());
}

double per_particle_limit(Family family, double beta) {
  if (beta <= 1.0) throw RegimeError("per-particle rate diverges for beta <= 1");
  return beta / ((family == Family::A ? 8.0 : 4.0) * (beta - 1.0));
}

double per_particle_rate(Family family, int n, double beta, const Vec& x0, RateMode mode,
                         const SimulateOptions& options) {
  if (beta <= 1.0) throw RegimeError("per-particle rate diverges for beta <= 1");
  const RootSystem system = build_root_system(family, n, beta);
  const double n2 = static_cast<double>(n) * n;
  if (mode == RateMode::ClosedForm) return total_rate_closed_form(system) / n2;
  if (x0.size() != n) throw MismatchError("start point dimension does not match N");
  const Vec y = x0 / std::sqrt(static_cast<double>(n));
  return estimate_rates_from(system, y, 1.0, options.replicas, options.dt, options.seed).total / n2;
}

std::vector<PhaseRow> phase_sweep(Family family, double beta, int n_min, int n_max, RateMode mode,
                                  double start_radius, const SimulateOptions& options) {
  if (n_min > n_max) throw ConfigError("n_min exceeds n_max");
  std::vector<PhaseRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    SimulateOptions opt = options;
    opt.seed = derive_seed(options.seed, static_cast<std::uint64_t>(n));
    PhaseRow row;
    row.n = n;
    row.beta = beta;
    row.mode = mode;
    row.theory = per_particle_limit(family, beta);
    row.rate_per_particle = per_particle_rate(family, n, beta, default_start(family, n, start_radius), mode, opt);
    rows.push_back(row);
  }
  return rows;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::string& hash, const RootSystem& system,
                          const JumpTrajectory& trajectory) {
  CsvWriter csv(path, hash, {"t", "event_root_i", "event_root_j", "root_code", "group_index"});
  for (const auto& e : trajectory.events) {
    const Root& r = system.root(e.root);
    csv << e.time << (r.i + 1) << (r.j < 0 ? 0 : r.j + 1) << r.label() << static_cast<long long>(e.group_index);
    csv.end_row();
  }
}

void write_phase_csv(const std::filesystem::path& path, const std::string& hash, const std::vector<PhaseRow>& rows) {
  CsvWriter csv(path, hash, {"N", "beta", "rate_per_particle", "theory", "mode"});
  for (const auto& r : rows) {
    csv << r.n << r.beta << r.rate_per_particle << r.theory << to_string(r.mode);
    csv.end_row();
  }
}

}  // namespace dunkl
