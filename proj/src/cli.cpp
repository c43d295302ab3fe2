#include "dunkl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "dunkl/dunklsim.hpp"
#include "dunkl/errors.hpp"
#include "dunkl/freezing.hpp"
#include "dunkl/io.hpp"
#include "dunkl/jumprates.hpp"
#include "dunkl/mastereq.hpp"
#include "dunkl/perturb.hpp"
#include "dunkl/rng.hpp"
#include "dunkl/weylgroup.hpp"

namespace dunkl {

namespace {

const std::vector<std::string> kKinds = {"simulate", "rates", "spectrum", "freeze", "perturb", "phase", "relax", "verify"};

std::string default_output(const std::string& kind) {
  if (kind == "simulate") return "paths.csv";
  if (kind == "rates") return "rates.json";
  if (kind == "spectrum") return "spectrum.csv";
  if (kind == "freeze") return "freeze.json";
  if (kind == "perturb") return "perturb.json";
  if (kind == "phase") return "phase.csv";
  if (kind == "relax") return "relax.csv";
  return "";
}

template <typename T>
T param(const SimConfig& c, const char* name, T fallback) {
  return c.parameters.contains(name) ? c.parameters.at(name).get<T>() : fallback;
}

Vec param_vec(const SimConfig& c, const char* name) {
  if (!c.parameters.contains(name)) return Vec();
  const auto v = c.parameters.at(name).get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::uint64_t require_seed(const SimConfig& c) {
  if (!c.seed) throw ConfigError("this experiment samples random numbers and needs a seed");
  return *c.seed;
}

RootSystem system_of(const SimConfig& c) { return build_root_system(c.family, c.n, c.beta, c.k); }

double dt_of(const SimConfig& c) { return c.dt.value_or(default_dt(c.beta)); }

RateCache cache_of(const SimConfig& c) {
  return c.cache_dir.empty() ? RateCache::from_environment() : RateCache(c.cache_dir);
}

std::string fmt(double v) { return format_double(v); }

int run_simulate(const SimConfig& c) {
  const RootSystem system = system_of(c);
  Vec x0 = param_vec(c, "x0");
  if (x0.size() == 0) x0 = default_start(c.family, c.n, param<double>(c, "radius", 0.0));
  if (x0.size() == 0 || x0.isZero(0.0)) {
    // Centred unit spacing (A) or 1..N (B) when no radius is requested.
    x0 = Vec(c.n);
    for (int i = 0; i < c.n; ++i) x0[i] = c.family == Family::A ? i - 0.5 * (c.n - 1) : i + 1.0;
  }
  const auto stride = param<std::size_t>(c, "save_stride", 10);
  const DunklPath path = simulate_dunkl(system, x0, c.T, dt_of(c), require_seed(c), stride);
  const std::string hash = c.hash();
  write_paths_csv(c.out, hash, path.radial);
  const std::string traj = param<std::string>(c, "trajectory", "trajectory.csv");
  write_trajectory_csv(traj, hash, system, path.jumps);
  std::cout << "simulate: " << path.radial.times.size() << " saved states, " << path.jumps.count()
            << " jumps -> " << c.out << ", " << traj << '\n';
  return 0;
}

int run_rates(const SimConfig& c) {
  const RootSystem system = system_of(c);
  const std::uint64_t seed = require_seed(c);
  const Vec y = param_vec(c, "x0");
  const RateCache cache = cache_of(c);
  RateTable table;
  if (y.size() == 0 || y.isZero(0.0)) {
    const SamplerTag sampler = param<std::string>(c, "sampler", "tridiagonal") == "mcmc" ? SamplerTag::Mcmc
                                                                                         : SamplerTag::Tridiagonal;
    table = cache.origin(system, c.nsamples, seed, sampler);
  } else {
    table = cache.from(system, y, param<double>(c, "t_ref", 1.0), c.nsamples, dt_of(c), seed);
  }
  write_json(c.out, to_json(table), c.hash());
  std::cout << "rates: total " << fmt(table.total) << " +- " << fmt(table.total_stderr);
  if (table.total_closed_form) std::cout << " (closed form " << fmt(*table.total_closed_form) << ")";
  if (table.variance_warning) std::cout << " [variance warning: beta*k <= 3]";
  std::cout << " -> " << c.out << '\n';
  return 0;
}

RateTable origin_rates(const SimConfig& c, const RootSystem& system) {
  if (param<bool>(c, "frozen", false)) return frozen_rate_table(system, peak_vector(system));
  return cache_of(c).origin(system, c.nsamples, require_seed(c));
}

int run_spectrum(const SimConfig& c) {
  const RootSystem system = system_of(c);
  const GroupTable table = GroupTable::enumerate(system);
  const MasterOperator op = build_master(origin_rates(c, system), table);
  const SpectrumResult s = spectrum(op);
  const std::string hash = c.hash();
  write_spectrum_csv(c.out, hash, s);
  if (c.parameters.contains("relax")) {
    const double ratio = param<double>(c, "ratio", 1000.0);
    const auto times = log_grid(1.0, ratio, param<std::size_t>(c, "points", 61));
    const auto theory = power_law_series(s, delta_distribution(op.dim(), 0), 1.0, times);
    write_relax_csv(c.parameters.at("relax").get<std::string>(), hash, DistributionSeries{}, theory);
  }
  std::cout << "spectrum: |W| = " << op.dim() << ", Lambda = " << fmt(op.Lambda) << ", r1 = " << fmt(s.r1())
            << ", r_min = " << fmt(s.values[s.values.size() - 1]) << " -> " << c.out << '\n';
  return 0;
}

int run_freeze(const SimConfig& c) {
  const RootSystem system = system_of(c);
  const PeakVector peak = peak_vector(system);
  const RateTable frozen = frozen_rate_table(system, peak);
  nlohmann::json j = {{"family", to_string(c.family)},
                      {"N", c.n},
                      {"z", std::vector<double>(peak.z.data(), peak.z.data() + peak.z.size())},
                      {"residual", peak.residual},
                      {"frozen_rates", frozen.lambdas()},
                      {"frozen_total", frozen.total},
                      {"pf_spectrum", nullptr},
                      {"verifications", nullptr}};
  if (c.family == Family::A) {
    const PFSpectrumReport pf = pf_spectrum(c.n);
    j["pf_spectrum"] = to_json(pf);
    nlohmann::json ver = {{"exchange_dev", nullptr}, {"commutator_dev", nullptr}, {"subspace_report", nullptr}};
    if (c.n <= 8) ver["exchange_dev"] = verify_exchange_identity(c.n);
    if (c.n <= 4) {
      const LadderReport lad = verify_ladder_commutators(c.n);
      ver["commutator_dev"] = {{"K", lad.commutator_K},
                               {"L", lad.commutator_L},
                               {"shift_residual", lad.shift_residual},
                               {"structure_antisymmetry", lad.structure_antisymmetry}};
      ver["subspace_report"] = to_json(verify_ladder_subspace(c.n));
    }
    j["verifications"] = ver;
    std::cout << "freeze: -1/2 multiplicity " << pf.half_multiplicity << ", min eigenvalue " << fmt(pf.min_eigenvalue)
              << " -> " << c.out << '\n';
  } else {
    std::cout << "freeze: peak residual " << fmt(peak.residual) << " -> " << c.out << '\n';
  }
  write_json(c.out, j, c.hash());
  return 0;
}

int run_perturb(const SimConfig& c) {
  const std::string method_name = param<std::string>(c, "method", c.n <= 3 ? "gauss_quadrature" : "mc");
  const IntegrationMethod method =
      method_name == "mc" ? IntegrationMethod::MonteCarlo : IntegrationMethod::GaussQuadrature;
  const auto betas = param<std::vector<double>>(c, "betas", {});
  const std::uint64_t seed = (method == IntegrationMethod::MonteCarlo || !betas.empty()) ? require_seed(c) : 0;
  const PerturbationReport rep = perturbation_report(c.family, c.n, method, c.nsamples, seed);
  const auto preds = predict_vs_measured(rep, betas, c.nsamples, derive_seed(seed, 1));
  write_json(c.out, to_json(rep, preds), c.hash());
  std::cout << "perturb: sum-rule residual corrected " << fmt(rep.residual_corrected) << ", paper "
            << fmt(rep.residual_paper) << " -> " << c.out << '\n';
  return 0;
}

int run_phase(const SimConfig& c) {
  const RateMode mode = rate_mode_from_string(param<std::string>(c, "mode", "closed_form"));
  const int n_min = param<int>(c, "n_min", c.family == Family::A ? 2 : 1);
  const int n_max = param<int>(c, "n_max", c.n);
  SimulateOptions opt;
  opt.replicas = c.replicas;
  opt.dt = c.dt.value_or(1e-3);
  opt.seed = mode == RateMode::Simulate ? require_seed(c) : 0;
  const auto rows = phase_sweep(c.family, c.beta, n_min, n_max, mode, param<double>(c, "radius", 1.0), opt);
  write_phase_csv(c.out, c.hash(), rows);
  std::cout << "phase: N = " << rows.back().n << " rate per particle " << fmt(rows.back().rate_per_particle)
            << " (limit " << fmt(rows.back().theory) << ") -> " << c.out << '\n';
  return 0;
}

int run_relax(const SimConfig& c) {
  const RootSystem system = system_of(c);
  const GroupTable table = GroupTable::enumerate(system);
  const MasterOperator op = build_master(origin_rates(c, system), table);
  const SpectrumResult s = spectrum(op);
  const double ratio = param<double>(c, "ratio", 1000.0);
  const auto times = log_grid(c.t0, c.t0 * ratio, param<std::size_t>(c, "points", 31));
  const Vec P0 = param<std::string>(c, "initial", "identity") == "uniform" ? uniform_distribution(op.dim())
                                                                             : delta_distribution(op.dim(), 0);
  const auto theory = power_law_series(s, P0, c.t0, times);
  const auto empirical = simulate_chain(op, P0, c.t0, times, c.replicas, require_seed(c));
  write_relax_csv(c.out, c.hash(), empirical, theory);
  const double tail = param<double>(c, "tail_fraction", 0.5);
  std::cout << "relax: r1 = " << fmt(s.r1());
  try {
    const ExponentFit fit = fit_relaxation_exponent(theory, tail);
    std::cout << ", fitted exponent " << fmt(fit.exponent) << " [" << fmt(fit.ci_low) << ", " << fmt(fit.ci_high)
              << "]";
  } catch (const InsufficientRangeError& e) {
    std::cout << ", fit rejected: " << e.what();
  }
  std::cout << " -> " << c.out << '\n';
  return 0;
}

int run_verify(const SimConfig& c) {
  const std::uint64_t seed = c.seed.value_or(1);
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failures;
  };

  for (const auto& [family, n] : std::vector<std::pair<Family, int>>{{Family::A, 4}, {Family::B, 3}}) {
    const RootSystem sys = build_root_system(family, n, 4.0);
    const GroupTable table = GroupTable::enumerate(sys);
    bool closed = true;
    for (const auto& a : sys.positive_roots())
      for (const auto& b : sys.positive_roots()) {
        const Vec r = reflect(a, b.vec);
        bool found = false;
        for (const auto& c2 : sys.positive_roots()) found |= (r - c2.vec).isZero(0.0) || (r + c2.vec).isZero(0.0);
        closed &= found;
      }
    check("root-closure " + to_string(family) + std::to_string(n), closed, "|W| = " + std::to_string(table.order()));

    const std::size_t samples = c.nsamples;
    const StaticSample sample = sample_static(sys, samples, seed);
    const MeanEstimate m = calibration_moment(sample);
    const double target = calibration_target(sys);
    check("calibration " + to_string(family) + std::to_string(n), std::abs(m.mean - target) <= 4 * m.stderr_,
          fmt(m.mean) + " vs " + fmt(target));

    const RateTable rates = estimate_rates_origin(sys, samples, seed);
    const double cf = total_rate_closed_form(sys);
    check("closed-form-total " + to_string(family) + std::to_string(n),
          std::abs(rates.total - cf) <= 3 * rates.total_stderr, fmt(rates.total) + " vs " + fmt(cf));

    const MasterOperator op = build_master(rates, table);
    const SpectrumResult s = spectrum(op);
    const double colsum = op.M.colwise().sum().cwiseAbs().maxCoeff();
    check("master-structure " + to_string(family) + std::to_string(n),
          colsum <= 1e-14 * std::max(1.0, op.Lambda) && s.values[0] <= 1e-10 &&
              std::abs(s.values[s.values.size() - 1] + 2 * op.Lambda) <= 1e-9,
          "r_min = " + fmt(s.values[s.values.size() - 1]));
  }

  for (int n = 2; n <= 5; ++n) {
    const PFSpectrumReport pf = pf_spectrum(n);
    check("pf-spectrum N" + std::to_string(n),
          pf.half_multiplicity == static_cast<std::size_t>(n - 1) &&
              std::abs(pf.min_eigenvalue + n * (n - 1) / 4.0) <= 1e-9,
          "-1/2 multiplicity " + std::to_string(pf.half_multiplicity));
  }
  double peak_worst = 0.0;
  for (int n = 2; n <= 12; ++n) {
    const RootSystem sys = build_root_system(Family::A, n, 2.0);
    const PeakVector p = peak_vector(sys);
    peak_worst = std::max({peak_worst, p.residual, (p.z - hermite_zeros(n)).lpNorm<Eigen::Infinity>()});
  }
  check("peak-vectors A2..A12", peak_worst <= 1e-10, "worst deviation " + fmt(peak_worst));
  check("exchange-identity N6", verify_exchange_identity(6) <= 1e-12, "");
  const LadderReport lad = verify_ladder_commutators(3);
  check("ladder-commutators N3", lad.commutator_K <= 1e-10 && lad.commutator_L <= 1e-10,
        fmt(lad.commutator_K) + ", " + fmt(lad.commutator_L));
  const SubspaceReport sub = verify_ladder_subspace(3);
  check("ladder-subspace N3", sub.verdicts_ok && sub.lowering_count == 2, "");
  const PerturbationReport pr = perturbation_report(Family::A, 2, IntegrationMethod::GaussQuadrature);
  check("sum-rule A2", pr.residual_corrected <= 1e-10 && std::abs(pr.residual_paper - 5.0 / 192.0) <= 1e-10,
        fmt(pr.residual_corrected) + ", " + fmt(pr.residual_paper));

  std::cout << (failures == 0 ? "verify: all checks passed\n" : "verify: " + std::to_string(failures) + " failed\n");
  return failures == 0 ? 0 : 3;
}

}  // namespace

nlohmann::json SimConfig::to_json() const {
  nlohmann::json k_json = family == Family::A ? nlohmann::json{{"root", k.root}}
                                              : nlohmann::json{{"short", k.short_root}, {"long", k.long_root}};
  nlohmann::json sampling = {{"nsamples", nsamples}, {"replicas", replicas}, {"t0", t0}, {"T", T}};
  sampling["dt"] = dt ? nlohmann::json(*dt) : nlohmann::json(nullptr);
  return {{"system", {{"family", dunkl::to_string(family)}, {"N", n}, {"beta", beta}, {"k", k_json}}},
          {"experiment", {{"kind", kind}, {"parameters", parameters}}},
          {"sampling", sampling},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
          {"output", {{"path", out}}}};
}

std::string SimConfig::hash() const { return config_hash(to_json()); }

SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  try {
    const auto& exp = j.at("experiment");
    c.kind = exp.at("kind").get<std::string>();
    if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
      throw ConfigError("unknown experiment kind '" + c.kind + "'");
    if (exp.contains("parameters")) c.parameters = exp.at("parameters");
    if (!c.parameters.is_object()) throw ConfigError("experiment.parameters must be an object");

    const auto sys = j.value("system", nlohmann::json::object());
    c.family = family_from_string(sys.value("family", std::string("A")));
    c.n = sys.value("N", 2);
    c.beta = sys.value("beta", 2.0);
    if (sys.contains("k")) {
      const auto& kj = sys.at("k");
      if (kj.is_number()) {
        c.k.root = c.k.short_root = c.k.long_root = kj.get<double>();
      } else {
        c.k.root = kj.value("root", 1.0);
        c.k.short_root = kj.value("short", 1.0);
        c.k.long_root = kj.value("long", 1.0);
      }
    }
    const auto sampling = j.value("sampling", nlohmann::json::object());
    c.nsamples = sampling.value("nsamples", c.nsamples);
    c.replicas = sampling.value("replicas", c.replicas);
    if (sampling.contains("dt") && !sampling.at("dt").is_null()) c.dt = sampling.at("dt").get<double>();
    c.t0 = sampling.value("t0", c.t0);
    c.T = sampling.value("T", c.T);
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.out = j.value("output", nlohmann::json::object()).value("path", default_output(c.kind));
    c.cache_dir = j.value("cache_dir", std::string());
    c.threads = j.value("threads", 0u);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw ConfigError("beta must be a positive number");
  if (c.n < 1 || c.n > 64) throw ConfigError("N must lie in [1, 64]");
  if (c.k.root < 0 || c.k.short_root < 0 || c.k.long_root < 0) throw ConfigError("multiplicities must be nonnegative");
  if (c.nsamples < 2) throw ConfigError("nsamples must be at least 2");
  if (c.replicas < 1) throw ConfigError("replicas must be positive");
  if (c.dt && !(*c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (!(c.T >= 0.0)) throw ConfigError("T must be nonnegative");
  return c;
}

int run(const SimConfig& config) {
  try {
    if (config.threads) set_max_threads(config.threads);
    static const std::map<std::string, std::function<int(const SimConfig&)>> handlers = {
        {"simulate", run_simulate}, {"rates", run_rates},   {"spectrum", run_spectrum}, {"freeze", run_freeze},
        {"perturb", run_perturb},   {"phase", run_phase},   {"relax", run_relax},       {"verify", run_verify}};
    return handlers.at(config.kind)(config);
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedMultiplicity& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Dunkl jump process laboratory"};
  app.require_subcommand(1, 1);

  struct Flags {
    std::string config, system, out, cache_dir, sampler, trajectory, relax, method, mode, initial;
    int n = 0, n_min = 0, n_max = 0;
    double beta = 0, k = 0, k_short = 0, k_long = 0, dt = 0, t0 = 0, T = 0, t_ref = 0, radius = 0, ratio = 0,
           tail_fraction = 0;
    std::size_t samples = 0, replicas = 0, save_stride = 0, points = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::vector<double> x0, betas;
    bool frozen = false;
  } f;

  const std::map<std::string, std::string> help = {
      {"simulate", "simulate a Dunkl path (paths.csv, trajectory.csv)"},
      {"rates", "estimate per-root jump rates (rates.json)"},
      {"spectrum", "master operator spectrum (spectrum.csv)"},
      {"freeze", "peak vector, PF spectrum and operator identities (freeze.json)"},
      {"perturb", "first-order large-beta corrections (perturb.json)"},
      {"phase", "per-particle jump rate against N (phase.csv)"},
      {"relax", "jump chain simulation and exponent fit (relax.csv)"},
      {"verify", "run the invariant suite"}};

  for (const auto& kind : kKinds) {
    CLI::App* sub = app.add_subcommand(kind, help.at(kind));
    sub->add_option("--config", f.config, "JSON config file; flags override its fields");
    sub->add_option("--system", f.system, "root system family (A or B)");
    sub->add_option("--n", f.n, "rank N");
    sub->add_option("--beta", f.beta, "inverse temperature beta");
    sub->add_option("--k", f.k, "multiplicity for every orbit");
    sub->add_option("--k-short", f.k_short, "B short-root multiplicity");
    sub->add_option("--k-long", f.k_long, "B long-root multiplicity");
    sub->add_option("--samples", f.samples, "Monte Carlo sample count");
    sub->add_option("--replicas", f.replicas, "replica count");
    sub->add_option("--dt", f.dt, "SDE time step");
    sub->add_option("--t0", f.t0, "reference time t0");
    sub->add_option("--T", f.T, "final time");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--out", f.out, "primary output file");
    sub->add_option("--cache-dir", f.cache_dir, "rate cache directory (default $DUNKL_CACHE_DIR)");
    sub->add_option("--threads", f.threads, "cap on worker threads");
    sub->add_option("--x0", f.x0, "start point")->delimiter(',');
    sub->add_option("--radius", f.radius, "norm of the default start point");
    sub->add_option("--save-stride", f.save_stride, "save every n-th SDE step");
    sub->add_option("--trajectory", f.trajectory, "trajectory.csv path");
    sub->add_option("--t-ref", f.t_ref, "reference time of the rate table");
    sub->add_option("--sampler", f.sampler, "static sampler: tridiagonal or mcmc");
    sub->add_flag("--frozen", f.frozen, "use frozen (beta -> infinity) rates");
    sub->add_option("--relax", f.relax, "also write the power-law series to this relax.csv");
    sub->add_option("--betas", f.betas, "beta values for predictions")->delimiter(',');
    sub->add_option("--method", f.method, "gauss_quadrature or mc");
    sub->add_option("--n-min", f.n_min, "smallest N of the sweep");
    sub->add_option("--n-max", f.n_max, "largest N of the sweep");
    sub->add_option("--mode", f.mode, "closed_form or simulate");
    sub->add_option("--ratio", f.ratio, "T / t0 of the relaxation series");
    sub->add_option("--points", f.points, "points of the log-time grid");
    sub->add_option("--initial", f.initial, "identity or uniform initial distribution");
    sub->add_option("--tail-fraction", f.tail_fraction, "tail fraction of the exponent fit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string kind = sub->get_name();
  auto set = [&](const char* name) { return sub->count(name) > 0; };

  try {
    nlohmann::json j = nlohmann::json::object();
    if (set("--config")) j = read_json(f.config);
    j["experiment"]["kind"] = kind;
    if (!j["experiment"].contains("parameters")) j["experiment"]["parameters"] = nlohmann::json::object();
    auto& p = j["experiment"]["parameters"];
    if (set("--system")) j["system"]["family"] = f.system;
    if (set("--n")) j["system"]["N"] = f.n;
    if (set("--beta")) j["system"]["beta"] = f.beta;
    if (set("--k")) j["system"]["k"] = f.k;
    if (set("--k-short")) j["system"]["k"]["short"] = f.k_short;
    if (set("--k-long")) j["system"]["k"]["long"] = f.k_long;
    if (set("--samples")) j["sampling"]["nsamples"] = f.samples;
    if (set("--replicas")) j["sampling"]["replicas"] = f.replicas;
    if (set("--dt")) j["sampling"]["dt"] = f.dt;
    if (set("--t0")) j["sampling"]["t0"] = f.t0;
    if (set("--T")) j["sampling"]["T"] = f.T;
    if (set("--seed")) j["seed"] = f.seed;
    if (set("--out")) j["output"]["path"] = f.out;
    if (set("--cache-dir")) j["cache_dir"] = f.cache_dir;
    if (set("--threads")) j["threads"] = f.threads;
    if (set("--x0")) p["x0"] = f.x0;
    if (set("--radius")) p["radius"] = f.radius;
    if (set("--save-stride")) p["save_stride"] = f.save_stride;
    if (set("--trajectory")) p["trajectory"] = f.trajectory;
    if (set("--t-ref")) p["t_ref"] = f.t_ref;
    if (set("--sampler")) p["sampler"] = f.sampler;
    if (set("--frozen")) p["frozen"] = f.frozen;
    if (set("--relax")) p["relax"] = f.relax;
    if (set("--betas")) p["betas"] = f.betas;
    if (set("--method")) p["method"] = f.method;
    if (set("--n-min")) p["n_min"] = f.n_min;
    if (set("--n-max")) p["n_max"] = f.n_max;
    if (set("--mode")) p["mode"] = f.mode;
    if (set("--ratio")) p["ratio"] = f.ratio;
    if (set("--points")) p["points"] = f.points;
    if (set("--initial")) p["initial"] = f.initial;
    if (set("--tail-fraction")) p["tail_fraction"] = f.tail_fraction;
    if (kind == "phase" && set("--n-max") && !j["system"].contains("N")) j["system"]["N"] = f.n_max;
    return run(config_from_json(j));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dunkl
