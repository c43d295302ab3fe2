#include "dunkl/radialsde.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dunkl/errors.hpp"
#include "dunkl/io.hpp"

namespace dunkl {

Vec drift(const RootSystem& system, const Vec& x) {
  Vec out = Vec::Zero(x.size());
  for (const auto& root : system.positive_roots()) {
    const double p = root.vec.dot(x);
    if (p == 0.0) throw WallError("drift evaluated on the wall of " + root.label());
    out += (0.5 * system.beta() * root.k / p) * root.vec;
  }
  return out;
}

double default_dt(double beta) { return 1e-4 * std::min(1.0, 1.0 / beta); }

RadialStepper::RadialStepper(const RootSystem& system, int max_halvings)
    : roots_(static_cast<Eigen::Index>(system.size()), system.rank()),
      half_beta_k_(static_cast<Eigen::Index>(system.size())),
      max_halvings_(max_halvings) {
  for (std::size_t a = 0; a < system.size(); ++a) {
    roots_.row(static_cast<Eigen::Index>(a)) = system.root(a).vec.transpose();
    half_beta_k_[static_cast<Eigen::Index>(a)] = 0.5 * system.beta() * system.root(a).k;
  }
}

void RadialStepper::step(Vec& x, double t, double h, Philox& rng, SubstepHook* hook) const {
  Vec dw(x.size());
  const double scale = std::sqrt(h);
  for (Eigen::Index i = 0; i < dw.size(); ++i) dw[i] = scale * rng.normal();
  step_rec(x, t, h, dw, rng, hook, 0);
}

void RadialStepper::step_rec(Vec& x, double t, double h, const Vec& dw, Philox& rng, SubstepHook* hook,
                             int depth) const {
  const bool split = hook != nullptr && depth < max_halvings_ && hook->needs_split(x, h);
  if (!split) {
    const Vec proj = roots_ * x;
    const Vec y = x + h * (roots_.transpose() * half_beta_k_.cwiseQuotient(proj)) + dw;
    if ((roots_ * y).minCoeff() > 0.0) {
      if (hook) hook->on_substep(x, t, h);
      x = y;
      return;
    }
    if (depth >= max_halvings_)
      throw StepError("Euler step left the Weyl chamber after " + std::to_string(max_halvings_) + " halvings");
  }
  // Brownian bridge midpoint: W(h/2) | W(h) = dw is N(dw/2, h/4).
  Vec first(x.size());
  const double bridge = std::sqrt(0.25 * h);
  for (Eigen::Index i = 0; i < first.size(); ++i) first[i] = 0.5 * dw[i] + bridge * rng.normal();
  const Vec second = dw - first;
  step_rec(x, t, 0.5 * h, first, rng, hook, depth + 1);
  step_rec(x, t + 0.5 * h, 0.5 * h, second, rng, hook, depth + 1);
}

void RadialStepper::advance(Vec& x, double t_from, double t_to, double dt, Philox& rng,
                            SubstepHook* hook) const {
  const double span = t_to - t_from;
  if (span <= 0.0) return;
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  const double h = span / static_cast<double>(std::max<std::size_t>(steps, 1));
  for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s)
    step(x, t_from + static_cast<double>(s) * h, h, rng, hook);
}

RadialPath simulate_radial(const RootSystem& system, const Vec& x0, double T, double dt, std::uint64_t seed,
                           std::size_t save_stride) {
  if (!(T >= 0.0)) throw ConfigError("T must be nonnegative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!chamber_interior(system, x0)) throw WallError("radial paths must start strictly inside the chamber");
  save_stride = std::max<std::size_t>(save_stride, 1);

  RadialPath path;
  path.beta = system.beta();
  path.x0 = x0;
  path.times.push_back(0.0);
  path.states.push_back(x0);
  if (T == 0.0) return path;

  RadialStepper stepper(system);
  Philox rng(seed, 0);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = T / static_cast<double>(steps);
  Vec x = x0;
  for (std::size_t s = 0; s < steps; ++s) {
    stepper.step(x, static_cast<double>(s) * h, h, rng);
    if ((s + 1) % save_stride == 0 || s + 1 == steps) {
      path.times.push_back(s + 1 == steps ? T : static_cast<double>(s + 1) * h);
      path.states.push_back(x);
    }
  }
  return path;
}

std::vector<Vec> radial_endpoints(const RootSystem& system, const Vec& x0, double T, double dt,
                                  std::size_t replicas, std::uint64_t seed) {
  if (!chamber_interior(system, x0)) throw WallError("radial paths must start strictly inside the chamber");
  RadialStepper stepper(system);
  std::vector<Vec> out(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    Philox rng(seed, r);
    Vec x = x0;
    stepper.advance(x, 0.0, T, dt, rng);
    out[r] = std::move(x);
  });
  return out;
}

std::string to_string(SamplerTag tag) { return tag == SamplerTag::Tridiagonal ? "tridiagonal" : "mcmc"; }

namespace {

double chi(double dof, Philox& rng) {
  std::gamma_distribution<double> gamma(0.5 * dof, 2.0);
  return std::sqrt(gamma(rng));
}

Vec tridiagonal_eigenvalues(const Vec& diag, const Vec& sub) {
  if (diag.size() == 1) return diag;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

Vec draw_static_tridiagonal(const RootSystem& system, Philox& rng) {
  const int n = system.rank();
  const auto& k = system.multiplicities();
  Vec diag(n);
  Vec sub(std::max(n - 1, 0));
  if (system.family() == Family::A) {
    // Hermite beta-ensemble: (1/sqrt 2) tridiag(N(0,2), chi_{(n-i) beta}).
    const double b = system.beta() * k.root;
    for (int i = 0; i < n; ++i) diag[i] = rng.normal();
    for (int i = 0; i + 1 < n; ++i) sub[i] = chi((n - 1 - i) * b, rng) / std::sqrt(2.0);
    return tridiagonal_eigenvalues(diag, sub);
  }
  // Laguerre beta-ensemble for y = x^2: exponent of y is (beta k_short - 1)/2
  // and the Vandermonde power is beta k_long.
  const double bl = system.beta() * k.long_root;
  const double bs = system.beta() * k.short_root;
  const double a = 0.5 * (bs - 1.0) + 1.0 + 0.5 * bl * (n - 1);
  Vec d(n);
  Vec c(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) d[i] = chi(2.0 * a - bl * i, rng);
  for (int i = 0; i + 1 < n; ++i) c[i] = chi(bl * (n - 1 - i), rng);
  for (int i = 0; i < n; ++i) diag[i] = d[i] * d[i] + (i > 0 ? c[i - 1] * c[i - 1] : 0.0);
  for (int i = 0; i + 1 < n; ++i) sub[i] = c[i] * d[i];
  Vec lambda = tridiagonal_eigenvalues(diag, sub);
  std::sort(lambda.data(), lambda.data() + n);
  for (int i = 0; i < n; ++i) lambda[i] = std::sqrt(std::max(lambda[i], 0.0));
  return lambda;
}

StaticSample sample_static(const RootSystem& system, std::size_t n, std::uint64_t seed, SamplerTag sampler) {
  if (n == 0) throw ConfigError("sample size must be positive");
  if (sampler == SamplerTag::Mcmc) return sample_static_mcmc(system, n, seed);
  StaticSample out;
  out.beta = system.beta();
  out.sampler_tag = SamplerTag::Tridiagonal;
  out.points.resize(system.rank(), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    Philox rng(seed, i);
    out.points.col(static_cast<Eigen::Index>(i)) = draw_static_tridiagonal(system, rng);
  });
  return out;
}

StaticSample sample_static_mcmc(const RootSystem& system, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kBurnIn = 1000;
  constexpr std::size_t kThin = 10;
  const int dim = system.rank();
  const double step = 0.3 / std::sqrt(static_cast<double>(dim));

  // Interior start on the ray through (1, 2, ..., N), recentred for A.
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = i + 1.0;
  if (system.family() == Family::A) x.array() -= x.mean();
  x *= std::sqrt(calibration_target(system)) / x.norm();

  auto log_density = [&](const Vec& y) { return log_weight(system, y) - 0.5 * y.squaredNorm(); };
  Philox rng(seed, 0);
  double current = log_density(x);
  std::size_t accepted = 0;
  std::size_t proposed = 0;

  StaticSample out;
  out.beta = system.beta();
  out.sampler_tag = SamplerTag::Mcmc;
  out.points.resize(dim, static_cast<Eigen::Index>(n));
  const std::size_t total = kBurnIn + n * kThin;
  Vec y(dim);
  for (std::size_t it = 0; it < total; ++it) {
    for (int i = 0; i < dim; ++i) y[i] = x[i] + step * rng.normal();
    ++proposed;
    if (chamber_interior(system, y)) {
      const double candidate = log_density(y);
      if (std::log(rng.uniform()) < candidate - current) {
        x = y;
        current = candidate;
        ++accepted;
      }
    }
    if (it >= kBurnIn && (it - kBurnIn + 1) % kThin == 0)
      out.points.col(static_cast<Eigen::Index>((it - kBurnIn) / kThin)) = x;
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  return out;
}

MeanEstimate estimate_mean(std::span<const double> values, SamplerTag tag) {
  const std::size_t n = values.size();
  MeanEstimate est;
  if (n == 0) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(n);
  if (n < 2) return est;
  if (tag == SamplerTag::Tridiagonal || n < 100) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return est;
  }
  constexpr std::size_t kBatches = 50;
  const std::size_t len = n / kBatches;
  double ss = 0.0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    double m = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) m += values[i];
    m /= static_cast<double>(len);
    ss += (m - est.mean) * (m - est.mean);
  }
  est.stderr_ = std::sqrt(ss / static_cast<double>(kBatches - 1) / static_cast<double>(kBatches));
  return est;
}

double calibration_target(const RootSystem& system) { return system.rank() + system.beta() * system.gamma(); }

MeanEstimate calibration_moment(const StaticSample& sample) {
  std::vector<double> norms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    norms[i] = sample.points.col(static_cast<Eigen::Index>(i)).squaredNorm();
  return estimate_mean(norms, sample.sampler_tag);
}

void write_paths_csv(const std::filesystem::path& path, const std::string& hash, const RadialPath& radial) {
  const Eigen::Index n = radial.x0.size();
  std::vector<std::string> columns{"t"};
  for (Eigen::Index i = 0; i < n; ++i) columns.push_back("x_" + std::to_string(i + 1));
  CsvWriter csv(path, hash, columns);
  for (std::size_t s = 0; s < radial.times.size(); ++s) {
    csv << radial.times[s];
    for (Eigen::Index i = 0; i < n; ++i) csv << radial.states[s][i];
    csv.end_row();
  }
}

}  // namespace dunkl
