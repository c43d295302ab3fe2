#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace dunkl {

using Vec = Eigen::VectorXd;

enum class Family { A, B };

// W-orbits of roots. Type A has a single orbit; type B splits into short
// roots e_i and long roots e_j +- e_i.
enum class Orbit { Root, Short, Long };

std::string to_string(Family family);
std::string to_string(Orbit orbit);
Family family_from_string(const std::string& name);

// Multiplicity per orbit. Only the entries relevant to the family are read.
struct Multiplicities {
  double root = 1.0;
  double short_root = 1.0;
  double long_root = 1.0;

  bool all_one(Family family) const;
  double of(Orbit orbit) const;
};

// A positive root. Coordinates use 0-based indices i < j:
//   A:      e_j - e_i
//   B short: e_i            (j = -1)
//   B long:  e_j - e_i (plus = false) or e_j + e_i (plus = true)
struct Root {
  Vec vec;
  Orbit orbit = Orbit::Root;
  double k = 1.0;
  double norm_sq = 0.0;
  int i = 0;
  int j = -1;
  bool plus = false;

  std::string label() const;
};

// Reduced root system of type A_{N-1} or B_N with its positive subsystem
// fixed by the chamber vector m = (1, 2, ..., N). Immutable.
class RootSystem {
 public:
  Family family() const { return family_; }
  int rank() const { return rank_; }
  double beta() const { return beta_; }
  const Multiplicities& multiplicities() const { return k_; }
  const std::vector<Root>& positive_roots() const { return roots_; }
  const Root& root(std::size_t a) const { return roots_.at(a); }
  std::size_t size() const { return roots_.size(); }
  double gamma() const { return gamma_; }

  // Same geometry and multiplicities at another beta.
  RootSystem with_beta(double beta) const;

  friend RootSystem build_root_system(Family, int, double, Multiplicities);

 private:
  RootSystem() = default;

  Family family_ = Family::A;
  int rank_ = 0;
  double beta_ = 0.0;
  Multiplicities k_;
  std::vector<Root> roots_;
  double gamma_ = 0.0;
};

// Throws DimensionError for N outside the family bounds (A: N >= 2,
// B: N >= 1) and RegimeError when beta * k(alpha) <= 1 for any orbit.
RootSystem build_root_system(Family family, int n, double beta, Multiplicities k = {});

// sigma_alpha x = x - 2 (alpha.x / |alpha|^2) alpha
Vec reflect(const Root& alpha, const Vec& x);

// w_beta(x) = prod |alpha.x|^{beta k(alpha)}
double weight(const RootSystem& system, const Vec& x);
double log_weight(const RootSystem& system, const Vec& x);

// True iff alpha.x >= -tol for every positive root.
bool chamber_contains(const RootSystem& system, const Vec& x, double tol = 0.0);

// True iff alpha.x > 0 for every positive root.
bool chamber_interior(const RootSystem& system, const Vec& x);

// A-family mirror pairing e_j - e_i <-> e_{N-1-i} - e_{N-1-j}; identity for B.
std::size_t mirror_partner(const RootSystem& system, std::size_t a);

// {family, N, beta, k: {orbit: value}}
nlohmann::json to_json(const RootSystem& system);
RootSystem root_system_from_json(const nlohmann::json& j);

}  // namespace dunkl
