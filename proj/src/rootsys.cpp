#include "dunkl/rootsys.hpp"

#include <cmath>
#include <sstream>

#include "dunkl/errors.hpp"

namespace dunkl {

std::string to_string(Family family) { return family == Family::A ? "A" : "B"; }

std::string to_string(Orbit orbit) {
  switch (orbit) {
    case Orbit::Root: return "root";
    case Orbit::Short: return "short";
    case Orbit::Long: return "long";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Family::A;
  if (name == "B" || name == "b") return Family::B;
  throw ConfigError("unknown root system family '" + name + "' (expected A or B)");
}

bool Multiplicities::all_one(Family family) const {
  if (family == Family::A) return root == 1.0;
  return short_root == 1.0 && long_root == 1.0;
}

double Multiplicities::of(Orbit orbit) const {
  switch (orbit) {
    case Orbit::Root: return root;
    case Orbit::Short: return short_root;
    case Orbit::Long: return long_root;
  }
  return root;
}

std::string Root::label() const {
  std::ostringstream out;
  if (j < 0) {
    out << "e" << i + 1;
  } else {
    out << "e" << j + 1 << (plus ? "+" : "-") << "e" << i + 1;
  }
  return out.str();
}

namespace {

Root make_root(int n, int i, int j, bool plus, Orbit orbit, double k) {
  Root r;
  r.vec = Vec::Zero(n);
  if (j < 0) {
    r.vec[i] = 1.0;
  } else {
    r.vec[j] = 1.0;
    r.vec[i] = plus ? 1.0 : -1.0;
  }
  r.orbit = orbit;
  r.k = k;
  r.norm_sq = r.vec.squaredNorm();
  r.i = i;
  r.j = j;
  r.plus = plus;
  return r;
}

void check_regime(double beta, double k, Orbit orbit) {
  if (!(k >= 0.0)) throw ConfigError("multiplicity must be nonnegative");
  if (!(beta * k > 1.0)) {
    std::ostringstream msg;
    msg << "beta*k = " << beta * k << " <= 1 on orbit '" << to_string(orbit)
        << "': jump rates diverge";
    throw RegimeError(msg.str());
  }
}

}  // namespace

RootSystem build_root_system(Family family, int n, double beta, Multiplicities k) {
  if (family == Family::A && n < 2) throw DimensionError("type A_{N-1} needs N >= 2");
  if (family == Family::B && n < 1) throw DimensionError("type B_N needs N >= 1");
  if (n > 64) throw DimensionError("rank above 64 is not supported");

  RootSystem r;
  r.family_ = family;
  r.rank_ = n;
  r.beta_ = beta;
  r.k_ = k;

  if (family == Family::A) {
    check_regime(beta, k.root, Orbit::Root);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) r.roots_.push_back(make_root(n, i, j, false, Orbit::Root, k.root));
  } else {
    check_regime(beta, k.short_root, Orbit::Short);
    if (n > 1) check_regime(beta, k.long_root, Orbit::Long);
    for (int i = 0; i < n; ++i) r.roots_.push_back(make_root(n, i, -1, false, Orbit::Short, k.short_root));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        r.roots_.push_back(make_root(n, i, j, false, Orbit::Long, k.long_root));
        r.roots_.push_back(make_root(n, i, j, true, Orbit::Long, k.long_root));
      }
    }
  }
  for (const auto& root : r.roots_) r.gamma_ += root.k;
  return r;
}

RootSystem RootSystem::with_beta(double beta) const {
  return build_root_system(family_, rank_, beta, k_);
}

Vec reflect(const Root& alpha, const Vec& x) {
  return x - (2.0 * alpha.vec.dot(x) / alpha.norm_sq) * alpha.vec;
}

double log_weight(const RootSystem& system, const Vec& x) {
  double acc = 0.0;
  for (const auto& root : system.positive_roots())
    acc += system.beta() * root.k * std::log(std::abs(root.vec.dot(x)));
  return acc;
}

double weight(const RootSystem& system, const Vec& x) {
  double w = 1.0;
  for (const auto& root : system.positive_roots())
    w *= std::pow(std::abs(root.vec.dot(x)), system.beta() * root.k);
  return w;
}

bool chamber_contains(const RootSystem& system, const Vec& x, double tol) {
  for (const auto& root : system.positive_roots())
    if (root.vec.dot(x) < -tol) return false;
  return true;
}

bool chamber_interior(const RootSystem& system, const Vec& x) {
  for (const auto& root : system.positive_roots())
    if (!(root.vec.dot(x) > 0.0)) return false;
  return true;
}

std::size_t mirror_partner(const RootSystem& system, std::size_t a) {
  if (system.family() != Family::A) return a;
  const int n = system.rank();
  const Root& r = system.root(a);
  const int i2 = n - 1 - r.j;
  const int j2 = n - 1 - r.i;
  for (std::size_t b = 0; b < system.size(); ++b)
    if (system.root(b).i == i2 && system.root(b).j == j2) return b;
  return a;
}

nlohmann::json to_json(const RootSystem& system) {
  nlohmann::json k;
  if (system.family() == Family::A) {
    k["root"] = system.multiplicities().root;
  } else {
    k["short"] = system.multiplicities().short_root;
    k["long"] = system.multiplicities().long_root;
  }
  return {{"family", to_string(system.family())}, {"N", system.rank()}, {"beta", system.beta()}, {"k", k}};
}

RootSystem root_system_from_json(const nlohmann::json& j) {
  try {
    const Family family = family_from_string(j.at("family").get<std::string>());
    Multiplicities k;
    if (j.contains("k")) {
      const auto& kj = j.at("k");
      if (kj.is_number()) {
        k.root = k.short_root = k.long_root = kj.get<double>();
      } else {
        k.root = kj.value("root", 1.0);
        k.short_root = kj.value("short", 1.0);
        k.long_root = kj.value("long", 1.0);
      }
    }
    return build_root_system(family, j.at("N").get<int>(), j.at("beta").get<double>(), k);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad root system descriptor: ") + e.what());
  }
}

}  // namespace dunkl
