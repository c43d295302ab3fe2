#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dunkl/radialsde.hpp"
#include "dunkl/rootsys.hpp"
#include "json.hpp"

namespace dunkl {

// beta k(alpha) |alpha|^2 / (4 (alpha.x)^2), the jump intensity along alpha.
double rate_integrand(const RootSystem& system, const Root& alpha, const Vec& x);

// beta |R_+| / (4 (beta - 1)) for k == 1.
double total_rate_closed_form(const RootSystem& system);

struct RateEntry {
  std::size_t root = 0;
  std::string label;
  double lambda = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

// Per-root rates lambda(t_ref, alpha | origin). total is the sum of the
// entries by definition.
struct RateTable {
  Family family = Family::A;
  int rank = 0;
  double beta = 0.0;
  Multiplicities k;
  Vec origin;
  double t_ref = 1.0;
  std::vector<RateEntry> entries;
  double total = 0.0;
  double total_stderr = 0.0;
  std::optional<double> total_closed_form;
  std::string sampler = "tridiagonal";
  std::uint64_t seed = 0;
  bool variance_warning = false;

  std::vector<double> lambdas() const;
  bool at_origin() const { return origin.size() == 0 || origin.isZero(0.0); }
};

// Table from explicit per-root rates (frozen limit, synthetic tests).
RateTable make_rate_table(const RootSystem& system, const std::vector<double>& lambdas, const std::string& sampler);

// Monte Carlo over the static law of X(1) from the origin.
RateTable estimate_rates_origin(const RootSystem& system, std::size_t nsamples, std::uint64_t seed,
                                SamplerTag sampler = SamplerTag::Tridiagonal);

// Monte Carlo over an SDE ensemble X(t_ref) with X(0) = y. y = 0 delegates
// to estimate_rates_origin with the exact 1/t_ref scaling.
RateTable estimate_rates_from(const RootSystem& system, const Vec& y, double t_ref, std::size_t nreplicas,
                              double dt, std::uint64_t seed);

// Rates lambda(1, alpha | s u) on a grid of s >= 0 along the unit direction u.
// The first grid point must be s = 0.
struct RateRay {
  Vec direction;
  std::vector<double> s;
  std::vector<RateTable> tables;
};

// s_grid: geometric grid s_min * ratio^i up to s_max, prefixed with 0.
std::vector<double> ray_grid(double s_min, double s_max, std::size_t points);

RateRay build_rate_ray(const RootSystem& system, const Vec& x0, const std::vector<double>& s_grid,
                       std::size_t nsamples, double dt, std::uint64_t seed);

// Per-root rates at time t from a table at the origin: lambda / t.
std::vector<double> rate_at_time(const RateTable& table, double t);

// Per-root rates at time t for a start x0 along the ray. Uses s = |x0|/sqrt(t)
// with interpolation linear in s^2 on the first cell and linear in log s
// beyond. ExtrapolationError past the last grid point.
std::vector<double> rate_at_time(const RateRay& ray, double t, const Vec& x0);

nlohmann::json to_json(const RateTable& table);
RateTable rate_table_from_json(const nlohmann::json& j);

// On-disk cache keyed by every input that affects the estimate. Hits replay
// the stored table bit for bit.
class RateCache {
 public:
  explicit RateCache(std::filesystem::path dir);
  // DUNKL_CACHE_DIR or ".dunkl_cache".
  static RateCache from_environment();

  const std::filesystem::path& dir() const { return dir_; }

  RateTable origin(const RootSystem& system, std::size_t nsamples, std::uint64_t seed,
                   SamplerTag sampler = SamplerTag::Tridiagonal) const;

  RateTable from(const RootSystem& system, const Vec& y, double t_ref, std::size_t nreplicas, double dt,
                 std::uint64_t seed) const;

 private:
  std::filesystem::path path_for(const nlohmann::json& key) const;
  std::optional<RateTable> load(const nlohmann::json& key) const;
  void store(const nlohmann::json& key, const RateTable& table) const;

  std::filesystem::path dir_;
};

}  // namespace dunkl
