#include "dunkl/mastereq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <boost/numeric/odeint.hpp>

#include "dunkl/errors.hpp"
#include "dunkl/io.hpp"

namespace dunkl {

Eigen::MatrixXd generator_matrix(const GroupTable& table, std::span<const double> lambdas) {
  if (lambdas.size() != table.num_roots()) throw MismatchError("one rate per positive root is required");
  const auto dim = static_cast<Eigen::Index>(table.order());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  double total = 0.0;
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    total += lambdas[a];
    const auto map = table.right_mult(a);
    for (Eigen::Index tau = 0; tau < dim; ++tau) M(tau, map[static_cast<std::size_t>(tau)]) += lambdas[a];
  }
  M.diagonal().array() -= total;
  return M;
}

MasterOperator build_master(const GroupTable& table, const std::vector<double>& lambdas) {
  MasterOperator op;
  op.family = table.family();
  op.rank = table.rank();
  op.M = generator_matrix(table, lambdas);
  op.lambdas = lambdas;
  op.Lambda = 0.0;
  for (double l : lambdas) op.Lambda += l;
  for (std::size_t a = 0; a < table.num_roots(); ++a) {
    const auto map = table.right_mult(a);
    op.right_mult.emplace_back(map.begin(), map.end());
  }
  for (std::size_t i = 0; i < table.order(); ++i) op.signs.push_back(table.sign(i));
  return op;
}

MasterOperator build_master(const RateTable& rates, const GroupTable& table) {
  if (rates.family != table.family() || rates.rank != table.rank() || rates.entries.size() != table.num_roots())
    throw MismatchError("rate table and group table describe different systems");
  if (!rates.at_origin()) throw MismatchError("the master operator needs rates from the origin");
  return build_master(table, rates.lambdas());
}

double SpectrumResult::r1() const {
  for (const auto& g : groups)
    if (g.value < -1e-9) return g.value;
  return 0.0;
}

SpectrumResult spectrum(const Eigen::MatrixXd& M, double group_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  const Eigen::Index n = M.rows();
  SpectrumResult s;
  s.values = solver.eigenvalues().reverse();
  s.vectors = solver.eigenvectors().rowwise().reverse();
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  s.group_of.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s.groups.empty() || std::abs(s.values[i] - s.groups.back().value) > group_tol * scale) {
      s.groups.push_back({s.values[i], static_cast<std::size_t>(i), 0});
    }
    auto& g = s.groups.back();
    ++g.multiplicity;
    s.group_of[static_cast<std::size_t>(i)] = s.groups.size() - 1;
  }
  // Report each group by the mean of its members.
  for (auto& g : s.groups) {
    double sum = 0.0;
    for (std::size_t i = g.first; i < g.first + g.multiplicity; ++i) sum += s.values[static_cast<Eigen::Index>(i)];
    g.value = sum / static_cast<double>(g.multiplicity);
  }
  return s;
}

SpectrumResult spectrum(const MasterOperator& op) { return spectrum(op.M); }

double eigen_residual(const Eigen::MatrixXd& M, const SpectrumResult& s) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    worst = std::max(worst, (M * s.vectors.col(i) - s.values[i] * s.vectors.col(i)).norm());
  return worst;
}

Vec uniform_distribution(std::size_t dim) {
  return Vec::Constant(static_cast<Eigen::Index>(dim), 1.0 / static_cast<double>(dim));
}

Vec delta_distribution(std::size_t dim, std::size_t tau) {
  Vec p = Vec::Zero(static_cast<Eigen::Index>(dim));
  p[static_cast<Eigen::Index>(tau)] = 1.0;
  return p;
}

Vec solve_power_law(const SpectrumResult& s, const Vec& P0, double t0, double t) {
  if (!(t0 > 0.0) || t < t0) throw ConfigError("power-law solution needs t >= t0 > 0");
  if (P0.size() != s.values.size()) throw MismatchError("distribution size does not match the spectrum");
  if (t == t0) return P0;
  const double log_ratio = std::log(t / t0);
  const Vec coeff = s.vectors.transpose() * P0;
  Vec decay(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) decay[i] = coeff[i] * std::exp(s.values[i] * log_ratio);
  Vec p = s.vectors * decay;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] < 0.0 && p[i] > -1e-12) p[i] = 0.0;
  return p;
}

DistributionSeries power_law_series(const SpectrumResult& s, const Vec& P0, double t0,
                                    const std::vector<double>& times) {
  DistributionSeries out;
  out.times = times;
  for (double t : times) out.values.push_back(solve_power_law(s, P0, t0, t));
  return out;
}

DistributionSeries simulate_chain(const MasterOperator& op, const Vec& P0, double t0, const std::vector<double>& times,
                                  std::size_t replicas, std::uint64_t seed) {
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < t0))
    throw ConfigError("chain times must be sorted and >= t0");
  if (replicas == 0) throw ConfigError("at least one replica is required");
  const std::size_t dim = op.dim();
  if (static_cast<std::size_t>(P0.size()) != dim) throw MismatchError("distribution size does not match the operator");

  std::vector<double> s_grid;
  for (double t : times) s_grid.push_back(std::log(t / t0));
  std::vector<double> cum_p0(dim);
  std::partial_sum(P0.data(), P0.data() + dim, cum_p0.begin());
  std::vector<double> cum_rate(op.lambdas.size());
  std::partial_sum(op.lambdas.begin(), op.lambdas.end(), cum_rate.begin());
  const double Lambda = cum_rate.empty() ? 0.0 : cum_rate.back();

  std::vector<std::vector<int>> states(replicas, std::vector<int>(times.size()));
  parallel_for(replicas, [&](std::size_t r) {
    Philox rng(seed, r);
    const double u0 = rng.uniform() * cum_p0.back();
    int tau = static_cast<int>(std::upper_bound(cum_p0.begin(), cum_p0.end(), u0) - cum_p0.begin());
    tau = std::min<int>(tau, static_cast<int>(dim) - 1);
    double next = Lambda > 0.0 ? -std::log(rng.uniform()) / Lambda : INFINITY;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      while (next <= s_grid[i]) {
        const double u = rng.uniform() * Lambda;
        std::size_t a = static_cast<std::size_t>(std::upper_bound(cum_rate.begin(), cum_rate.end(), u) - cum_rate.begin());
        a = std::min(a, cum_rate.size() - 1);
        tau = op.right_mult[a][static_cast<std::size_t>(tau)];
        next += -std::log(rng.uniform()) / Lambda;
      }
      states[r][i] = tau;
    }
  });

  DistributionSeries out;
  out.times = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    Vec p = Vec::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < replicas; ++r) p[states[r][i]] += 1.0;
    out.values.push_back(p / static_cast<double>(replicas));
  }
  return out;
}

DistributionSeries integrate_inhomogeneous(const GroupTable& table, const RateFunction& rate_fn, const Vec& P0,
                                           double t0, const std::vector<double>& times, double tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (times.empty() || times.front() != t0 || !std::is_sorted(times.begin(), times.end()))
    throw ConfigError("output times must start at t0 and increase");
  const std::size_t dim = table.order();
  if (static_cast<std::size_t>(P0.size()) != dim) throw MismatchError("distribution size does not match the group");

  std::vector<std::span<const int>> maps;
  for (std::size_t a = 0; a < table.num_roots(); ++a) maps.push_back(table.right_mult(a));

  // d/ds with s = log(t/t0): dP/ds = t M(t) P.
  auto rhs = [&](const State& p, State& dp, double s) {
    const double t = t0 * std::exp(s);
    const std::vector<double> lambdas = rate_fn(t);
    if (lambdas.size() != maps.size()) throw MismatchError("rate function returned the wrong number of rates");
    std::fill(dp.begin(), dp.end(), 0.0);
    for (std::size_t a = 0; a < maps.size(); ++a) {
      const double w = lambdas[a] * t;
      for (std::size_t tau = 0; tau < dim; ++tau)
        dp[tau] += w * (p[static_cast<std::size_t>(maps[a][tau])] - p[tau]);
    }
  };

  std::vector<double> s_times;
  for (double t : times) s_times.push_back(std::log(t / t0));
  State state(P0.data(), P0.data() + dim);
  DistributionSeries out;
  out.times = times;
  auto observer = [&](const State& p, double) {
    out.values.push_back(Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(dim)));
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, state, s_times.begin(), s_times.end(), 1e-3, observer,
                            odeint::max_step_checker(100000));
  } catch (const odeint::step_adjustment_error& e) {
    throw StiffnessError(std::string("step size floor reached: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw StiffnessError(std::string("integrator made no progress: ") + e.what());
  }
  return out;
}

std::vector<double> log_grid(double t0, double T, std::size_t points) {
  if (!(t0 > 0.0) || !(T >= t0) || points < 2) throw ConfigError("invalid log grid");
  std::vector<double> out(points);
  const double span = std::log(T / t0);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = t0 * std::exp(span * static_cast<double>(i) / static_cast<double>(points - 1));
  out.front() = t0;
  out.back() = T;
  return out;
}

ExponentFit fit_relaxation_exponent(const DistributionSeries& series, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail_fraction must lie in (0, 1]");
  const auto& times = series.times;
  if (times.size() < 3 || !(times.front() > 0.0) || std::log10(times.back() / times.front()) < 2.0 - 1e-12)
    throw InsufficientRangeError("the series must span at least two decades in t");
  const double lo = std::log(times.front());
  const double hi = std::log(times.back());
  const double cut = hi - tail_fraction * (hi - lo);
  const double uniform = 1.0 / static_cast<double>(series.values.front().size());

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double lt = std::log(times[i]);
    if (lt < cut - 1e-12) continue;
    const double d = (series.values[i].array() - uniform).abs().maxCoeff();
    if (!(d > 1e-13)) continue;
    xs.push_back(lt);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 3) throw InsufficientRangeError("no relaxation signal above round-off in the tail");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.points = xs.size();
  fit.exponent = sxy / sxx;
  fit.log_amplitude = my - fit.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.log_amplitude - fit.exponent * xs[i];
    ssr += r * r;
  }
  fit.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.exponent - q * fit.stderr_;
  fit.ci_high = fit.exponent + q * fit.stderr_;
  return fit;
}

void write_spectrum_csv(const std::filesystem::path& path, const std::string& hash, const SpectrumResult& s) {
  CsvWriter csv(path, hash, {"index", "eigenvalue", "multiplicity_group"});
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    csv << static_cast<long long>(i) << s.values[i] << s.group_of[static_cast<std::size_t>(i)];
    csv.end_row();
  }
}

void write_relax_csv(const std::filesystem::path& path, const std::string& hash, const DistributionSeries& empirical,
                     const DistributionSeries& theory) {
  CsvWriter csv(path, hash, {"t", "tau_index", "p_emp", "p_theory"});
  for (std::size_t i = 0; i < theory.times.size(); ++i) {
    for (Eigen::Index tau = 0; tau < theory.values[i].size(); ++tau) {
      csv << theory.times[i] << static_cast<long long>(tau);
      if (i < empirical.values.size())
        csv << empirical.values[i][tau];
      else
        csv << std::string();
      csv << theory.values[i][tau];
      csv.end_row();
    }
  }
}

}  // namespace dunkl
