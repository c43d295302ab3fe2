#include "dunkl/weylgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

std::uint64_t encode(const GroupElement& g) {
  std::uint64_t key = 0;
  for (int p : g.perm) key = (key << 4) | static_cast<std::uint64_t>(p);
  for (int s : g.signs) key = (key << 1) | (s < 0 ? 1u : 0u);
  return key;
}

std::size_t factorial(int n) {
  std::size_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

}  // namespace

Vec act(const GroupElement& g, const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[g.perm[i]] = g.signs[i] * x[i];
  return y;
}

int sign_of(const GroupElement& g) {
  // Parity by cycle decomposition.
  const std::size_t n = g.perm.size();
  std::vector<bool> seen(n, false);
  int parity = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t c = i; !seen[c]; c = static_cast<std::size_t>(g.perm[c])) {
      seen[c] = true;
      ++len;
    }
    if (len % 2 == 0) parity = -parity;
  }
  for (int s : g.signs) parity *= s;
  return parity;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  const std::size_t n = g.perm.size();
  GroupElement out;
  out.perm.resize(n);
  out.signs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int hi = h.perm[i];
    out.perm[i] = g.perm[hi];
    out.signs[i] = h.signs[i] * g.signs[hi];
  }
  return out;
}

GroupElement reflection_element(const Root& alpha, int n) {
  GroupElement g;
  g.perm.resize(n);
  std::iota(g.perm.begin(), g.perm.end(), 0);
  g.signs.assign(n, 1);
  if (alpha.j < 0) {
    g.signs[alpha.i] = -1;
  } else {
    std::swap(g.perm[alpha.i], g.perm[alpha.j]);
    if (alpha.plus) {
      g.signs[alpha.i] = -1;
      g.signs[alpha.j] = -1;
    }
  }
  return g;
}

double group_order(Family family, int n) {
  double order = std::tgamma(n + 1.0);
  return family == Family::A ? order : order * std::ldexp(1.0, n);
}

std::int64_t lexicographic_rank(const GroupElement& g, Family family) {
  const int n = static_cast<int>(g.perm.size());
  if (group_order(family, n) > 0x1p62) return -1;
  std::int64_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j) smaller += g.perm[j] < g.perm[i];
    rank = rank * (n - i) + smaller;
  }
  if (family == Family::B)
    for (int s : g.signs) rank = (rank << 1) | (s < 0 ? 1 : 0);
  return rank;
}

GroupTable GroupTable::enumerate(const RootSystem& system, std::size_t cap) {
  const int n = system.rank();
  const std::size_t n_signs = system.family() == Family::A ? 1 : (std::size_t{1} << n);
  const std::size_t order = factorial(n) * n_signs;
  if (order > cap)
    throw SizeError("|W| = " + std::to_string(order) + " exceeds the cap " + std::to_string(cap));

  GroupTable table;
  table.family_ = system.family();
  table.rank_ = n;
  table.elements_.reserve(order);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t mask = 0; mask < n_signs; ++mask) {
      GroupElement g;
      g.perm = perm;
      g.signs.resize(n);
      // Most significant bit belongs to coordinate 0 so the order is lexicographic.
      for (int i = 0; i < n; ++i) g.signs[i] = system.family() == Family::A ? 1 : (((mask >> (n - 1 - i)) & 1u) ? -1 : 1);
      g.index = static_cast<int>(table.elements_.size());
      table.lookup_.emplace(encode(g), g.index);
      table.elements_.push_back(std::move(g));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  table.signs_.reserve(order);
  for (const auto& g : table.elements_) table.signs_.push_back(sign_of(g));

  table.right_mult_.resize(system.size());
  for (std::size_t a = 0; a < system.size(); ++a) {
    const GroupElement sigma = reflection_element(system.root(a), n);
    auto& map = table.right_mult_[a];
    map.resize(order);
    for (std::size_t i = 0; i < order; ++i) map[i] = table.index_of(compose(table.elements_[i], sigma));
  }
  return table;
}

int GroupTable::index_of(const GroupElement& g) const {
  const auto it = lookup_.find(encode(g));
  if (it == lookup_.end()) throw MismatchError("element is not in the enumerated group");
  return it->second;
}

int GroupTable::multiply(std::size_t i, std::size_t j) const {
  return index_of(compose(elements_.at(i), elements_.at(j)));
}

}  // namespace dunkl
