#include "dunkl/jumprates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dunkl/errors.hpp"
#include "dunkl/io.hpp"

namespace dunkl {

double rate_integrand(const RootSystem& system, const Root& alpha, const Vec& x) {
  const double p = alpha.vec.dot(x);
  if (p == 0.0) throw WallError("rate integrand evaluated on the wall of " + alpha.label());
  return system.beta() * alpha.k * alpha.norm_sq / (4.0 * p * p);
}

double total_rate_closed_form(const RootSystem& system) {
  if (system.beta() <= 1.0) throw RegimeError("total rate diverges for beta <= 1");
  if (!system.multiplicities().all_one(system.family()))
    throw UnsupportedMultiplicity("closed-form total rate requires k == 1");
  const double b = system.beta();
  return b * static_cast<double>(system.size()) / (4.0 * (b - 1.0));
}

std::vector<double> RateTable::lambdas() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.lambda);
  return out;
}

namespace {

RateTable blank_table(const RootSystem& system, const std::string& sampler) {
  RateTable table;
  table.family = system.family();
  table.rank = system.rank();
  table.beta = system.beta();
  table.k = system.multiplicities();
  table.origin = Vec::Zero(system.rank());
  table.sampler = sampler;
  for (const auto& root : system.positive_roots())
    if (system.beta() * root.k <= 3.0) table.variance_warning = true;
  table.entries.resize(system.size());
  for (std::size_t a = 0; a < system.size(); ++a) {
    table.entries[a].root = a;
    table.entries[a].label = system.root(a).label();
  }
  return table;
}

void finish_total(RateTable& table) {
  table.total = 0.0;
  for (const auto& e : table.entries) table.total += e.lambda;
}

std::optional<double> closed_form_if_available(const RootSystem& system) {
  if (!system.multiplicities().all_one(system.family())) return std::nullopt;
  return total_rate_closed_form(system);
}

// Running sums per root plus the per-sample total.
struct Moments {
  std::vector<double> sum;
  std::vector<double> sumsq;
  std::size_t n = 0;

  explicit Moments(std::size_t roots = 0) : sum(roots + 1, 0.0), sumsq(roots + 1, 0.0) {}

  void add(const RootSystem& system, const Vec& x) {
    double total = 0.0;
    for (std::size_t a = 0; a < system.size(); ++a) {
      const double v = rate_integrand(system, system.root(a), x);
      sum[a] += v;
      sumsq[a] += v * v;
      total += v;
    }
    sum.back() += total;
    sumsq.back() += total * total;
    ++n;
  }

  void merge(const Moments& other) {
    for (std::size_t a = 0; a < sum.size(); ++a) {
      sum[a] += other.sum[a];
      sumsq[a] += other.sumsq[a];
    }
    n += other.n;
  }
};

double stderr_of(double sum, double sumsq, std::size_t n) {
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = std::max(0.0, (sumsq - dn * mean * mean) / (dn - 1.0));
  return std::sqrt(var / dn);
}

void fill_from_moments(RateTable& table, const Moments& m) {
  const double dn = static_cast<double>(m.n);
  for (std::size_t a = 0; a < table.entries.size(); ++a) {
    table.entries[a].lambda = m.sum[a] / dn;
    table.entries[a].stderr_ = stderr_of(m.sum[a], m.sumsq[a], m.n);
    table.entries[a].n = m.n;
  }
  finish_total(table);
  table.total_stderr = stderr_of(m.sum.back(), m.sumsq.back(), m.n);
}

constexpr std::size_t kChunk = 4096;

}  // namespace

RateTable make_rate_table(const RootSystem& system, const std::vector<double>& lambdas, const std::string& sampler) {
  if (lambdas.size() != system.size()) throw MismatchError("one rate per positive root is required");
  RateTable table = blank_table(system, sampler);
  table.variance_warning = false;
  for (std::size_t a = 0; a < lambdas.size(); ++a) table.entries[a].lambda = lambdas[a];
  finish_total(table);
  return table;
}

RateTable estimate_rates_origin(const RootSystem& system, std::size_t nsamples, std::uint64_t seed,
                                SamplerTag sampler) {
  if (nsamples < 2) throw ConfigError("at least two samples are required");
  RateTable table = blank_table(system, to_string(sampler));
  table.seed = seed;
  table.total_closed_form = closed_form_if_available(system);

  if (sampler == SamplerTag::Mcmc) {
    const StaticSample sample = sample_static_mcmc(system, nsamples, seed);
    std::vector<double> values(nsamples);
    std::vector<double> totals(nsamples, 0.0);
    for (std::size_t a = 0; a < system.size(); ++a) {
      for (std::size_t i = 0; i < nsamples; ++i) {
        values[i] = rate_integrand(system, system.root(a), sample.points.col(static_cast<Eigen::Index>(i)));
        totals[i] += values[i];
      }
      const MeanEstimate est = estimate_mean(values, SamplerTag::Mcmc);
      table.entries[a].lambda = est.mean;
      table.entries[a].stderr_ = est.stderr_;
      table.entries[a].n = nsamples;
    }
    finish_total(table);
    table.total_stderr = estimate_mean(totals, SamplerTag::Mcmc).stderr_;
    return table;
  }

  // Draw i uses stream i, exactly as sample_static, without storing the sample.
  const std::size_t chunks = (nsamples + kChunk - 1) / kChunk;
  std::vector<Moments> partial(chunks, Moments(system.size()));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(nsamples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      Philox rng(seed, i);
      partial[c].add(system, draw_static_tridiagonal(system, rng));
    }
  });
  Moments all(system.size());
  for (const auto& m : partial) all.merge(m);
  fill_from_moments(table, all);
  return table;
}

RateTable estimate_rates_from(const RootSystem& system, const Vec& y, double t_ref, std::size_t nreplicas,
                              double dt, std::uint64_t seed) {
  if (!(t_ref > 0.0)) throw ConfigError("t_ref must be positive");
  if (y.size() != system.rank()) throw MismatchError("start point dimension does not match the root system");
  if (y.isZero(0.0)) {
    RateTable table = estimate_rates_origin(system, nreplicas, seed);
    for (auto& e : table.entries) {
      e.lambda /= t_ref;
      e.stderr_ /= t_ref;
    }
    finish_total(table);
    table.total_stderr /= t_ref;
    if (table.total_closed_form) *table.total_closed_form /= t_ref;
    table.t_ref = t_ref;
    return table;
  }
  if (nreplicas < 2) throw ConfigError("at least two replicas are required");
  const std::vector<Vec> ends = radial_endpoints(system, y, t_ref, dt, nreplicas, seed);
  RateTable table = blank_table(system, "sde");
  table.seed = seed;
  table.origin = y;
  table.t_ref = t_ref;
  Moments all(system.size());
  for (const auto& x : ends) all.add(system, x);
  fill_from_moments(table, all);
  return table;
}

std::vector<double> ray_grid(double s_min, double s_max, std::size_t points) {
  if (!(s_min > 0.0) || !(s_max > s_min) || points < 2) throw ConfigError("invalid ray grid");
  std::vector<double> s{0.0};
  const double ratio = std::pow(s_max / s_min, 1.0 / static_cast<double>(points - 1));
  for (std::size_t i = 0; i < points; ++i) s.push_back(i + 1 == points ? s_max : s_min * std::pow(ratio, i));
  return s;
}

RateRay build_rate_ray(const RootSystem& system, const Vec& x0, const std::vector<double>& s_grid,
                       std::size_t nsamples, double dt, std::uint64_t seed) {
  if (s_grid.size() < 2 || s_grid.front() != 0.0) throw ConfigError("ray grid must start at s = 0");
  if (!std::is_sorted(s_grid.begin(), s_grid.end()) ||
      std::adjacent_find(s_grid.begin(), s_grid.end()) != s_grid.end())
    throw ConfigError("ray grid must be strictly increasing");
  const double norm = x0.norm();
  if (norm == 0.0) throw ConfigError("ray direction needs a nonzero start point");
  RateRay ray;
  ray.direction = x0 / norm;
  ray.s = s_grid;
  ray.tables.reserve(s_grid.size());
  ray.tables.push_back(estimate_rates_origin(system, nsamples, seed));
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    ray.tables.push_back(
        estimate_rates_from(system, s_grid[i] * ray.direction, 1.0, nsamples, dt, derive_seed(seed, i)));
  return ray;
}

std::vector<double> rate_at_time(const RateTable& table, double t) {
  if (!(t > 0.0)) throw ConfigError("t must be positive");
  if (!table.at_origin()) throw MismatchError("exact 1/t scaling needs a table at the origin");
  std::vector<double> out = table.lambdas();
  const double scale = table.t_ref == 1.0 ? t : t / table.t_ref;
  for (double& v : out) v /= scale;
  return out;
}

std::vector<double> rate_at_time(const RateRay& ray, double t, const Vec& x0) {
  if (!(t > 0.0)) throw ConfigError("t must be positive");
  const double norm = x0.norm();
  if (norm == 0.0) return rate_at_time(ray.tables.front(), t);
  if ((x0 / norm - ray.direction).norm() > 1e-9) throw MismatchError("start point is not on the cached ray");
  const double s = norm / std::sqrt(t);
  if (s > ray.s.back()) throw ExtrapolationError("x0/sqrt(t) lies beyond the cached ray grid");

  std::size_t hi = 1;
  while (ray.s[hi] < s) ++hi;
  const std::size_t lo = hi - 1;
  double w;
  if (lo == 0) {
    w = (s * s) / (ray.s[hi] * ray.s[hi]);
  } else {
    w = std::log(s / ray.s[lo]) / std::log(ray.s[hi] / ray.s[lo]);
  }
  const auto a = ray.tables[lo].lambdas();
  const auto b = ray.tables[hi].lambdas();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ((1.0 - w) * a[i] + w * b[i]) / t;
  return out;
}

namespace {

nlohmann::json k_json(Family family, const Multiplicities& k) {
  if (family == Family::A) return {{"root", k.root}};
  return {{"short", k.short_root}, {"long", k.long_root}};
}

std::vector<int> root_indices(const Root& r) {
  if (r.j < 0) return {r.i + 1};
  return {r.i + 1, r.j + 1};
}

}  // namespace

nlohmann::json to_json(const RateTable& table) {
  const RootSystem system = build_root_system(table.family, table.rank, table.beta, table.k);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"id", e.root},
                       {"root", root_indices(system.root(e.root))},
                       {"label", e.label},
                       {"lambda", e.lambda},
                       {"stderr", e.stderr_},
                       {"n", e.n}});
  }
  std::vector<double> origin(table.origin.data(), table.origin.data() + table.origin.size());
  nlohmann::json j = {{"system", to_string(table.family)},
                      {"N", table.rank},
                      {"beta", table.beta},
                      {"k", k_json(table.family, table.k)},
                      {"origin", origin},
                      {"t_ref", table.t_ref},
                      {"entries", entries},
                      {"total", table.total},
                      {"total_stderr", table.total_stderr},
                      {"total_closed_form", nullptr},
                      {"sampler_tag", table.sampler},
                      {"seed", table.seed},
                      {"variance_warning", table.variance_warning}};
  if (table.total_closed_form) j["total_closed_form"] = *table.total_closed_form;
  return j;
}

RateTable rate_table_from_json(const nlohmann::json& j) {
  try {
    RateTable table;
    table.family = family_from_string(j.at("system").get<std::string>());
    table.rank = j.at("N").get<int>();
    table.beta = j.at("beta").get<double>();
    const auto& kj = j.at("k");
    table.k.root = kj.value("root", 1.0);
    table.k.short_root = kj.value("short", 1.0);
    table.k.long_root = kj.value("long", 1.0);
    const auto origin = j.at("origin").get<std::vector<double>>();
    table.origin = Eigen::Map<const Vec>(origin.data(), static_cast<Eigen::Index>(origin.size()));
    table.t_ref = j.at("t_ref").get<double>();
    for (const auto& e : j.at("entries")) {
      RateEntry entry;
      entry.root = e.at("id").get<std::size_t>();
      entry.label = e.at("label").get<std::string>();
      entry.lambda = e.at("lambda").get<double>();
      entry.stderr_ = e.at("stderr").get<double>();
      entry.n = e.at("n").get<std::size_t>();
      table.entries.push_back(std::move(entry));
    }
    table.total = j.at("total").get<double>();
    table.total_stderr = j.value("total_stderr", 0.0);
    if (!j.at("total_closed_form").is_null()) table.total_closed_form = j.at("total_closed_form").get<double>();
    table.sampler = j.at("sampler_tag").get<std::string>();
    table.seed = j.at("seed").get<std::uint64_t>();
    table.variance_warning = j.value("variance_warning", false);
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad rate table: ") + e.what());
  }
}

RateCache::RateCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

RateCache RateCache::from_environment() {
  const char* env = std::getenv("DUNKL_CACHE_DIR");
  return RateCache(env && *env ? std::filesystem::path(env) : std::filesystem::path(".dunkl_cache"));
}

std::filesystem::path RateCache::path_for(const nlohmann::json& key) const {
  return dir_ / ("rates-" + config_hash(key) + ".json");
}

std::optional<RateTable> RateCache::load(const nlohmann::json& key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const nlohmann::json stored = read_json(path);
    if (stored.at("key") != key) return std::nullopt;
    return rate_table_from_json(stored.at("table"));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void RateCache::store(const nlohmann::json& key, const RateTable& table) const {
  const nlohmann::json doc = {{"key", key}, {"table", to_json(table)}};
  atomic_write(path_for(key), doc.dump() + "\n");
}

RateTable RateCache::origin(const RootSystem& system, std::size_t nsamples, std::uint64_t seed,
                            SamplerTag sampler) const {
  const nlohmann::json key = {{"kind", "origin"},
                              {"system", to_json(system)},
                              {"nsamples", nsamples},
                              {"seed", seed},
                              {"sampler", to_string(sampler)}};
  if (auto hit = load(key)) return *hit;
  RateTable table = estimate_rates_origin(system, nsamples, seed, sampler);
  store(key, table);
  return table;
}

RateTable RateCache::from(const RootSystem& system, const Vec& y, double t_ref, std::size_t nreplicas, double dt,
                          std::uint64_t seed) const {
  const std::vector<double> yv(y.data(), y.data() + y.size());
  const nlohmann::json key = {{"kind", "from"},     {"system", to_json(system)}, {"y", yv},   {"t_ref", t_ref},
                              {"nreplicas", nreplicas}, {"dt", dt},                 {"seed", seed}};
  if (auto hit = load(key)) return *hit;
  RateTable table = estimate_rates_from(system, y, t_ref, nreplicas, dt, seed);
  store(key, table);
  return table;
}

}  // namespace dunkl
