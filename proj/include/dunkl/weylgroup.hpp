#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dunkl/rootsys.hpp"

namespace dunkl {

// Signed permutation g acting by g e_i = signs[i] e_{perm[i]} (0-based).
// Type A elements carry signs == +1 throughout.
struct GroupElement {
  std::vector<int> perm;
  std::vector<int> signs;
  int index = -1;
};

Vec act(const GroupElement& g, const Vec& x);
int sign_of(const GroupElement& g);
GroupElement compose(const GroupElement& g, const GroupElement& h);  // g o h, index unset
GroupElement reflection_element(const Root& alpha, int n);

// N! for A, 2^N N! for B.
double group_order(Family family, int n);

// Position of g in the ordering used by GroupTable, computed without
// enumeration; -1 when |W| exceeds 2^62.
std::int64_t lexicographic_rank(const GroupElement& g, Family family);

inline constexpr std::size_t kDefaultGroupCap = 10080;

// Enumerated Weyl group with right multiplication tables.
// Elements are ordered lexicographically in (perm, signs) with +1 before -1,
// so index 0 is the identity.
class GroupTable {
 public:
  static GroupTable enumerate(const RootSystem& system, std::size_t cap = kDefaultGroupCap);

  Family family() const { return family_; }
  int rank() const { return rank_; }
  std::size_t order() const { return elements_.size(); }
  std::size_t num_roots() const { return right_mult_.size(); }
  const GroupElement& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<GroupElement>& elements() const { return elements_; }

  // rho_a[i] = index of element_i o sigma_a.
  std::span<const int> right_mult(std::size_t a) const { return right_mult_.at(a); }

  int sign(std::size_t i) const { return signs_.at(i); }
  int index_of(const GroupElement& g) const;
  int multiply(std::size_t i, std::size_t j) const;

 private:
  Family family_ = Family::A;
  int rank_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<std::vector<int>> right_mult_;
  std::vector<int> signs_;
  std::unordered_map<std::uint64_t, int> lookup_;
};

}  // namespace dunkl
