#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

namespace dunkl {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
// 64-bit stream id occupies the upper half of the counter, so replica r of a
// run with seed s always draws from the same sequence regardless of how the
// replicas are scheduled across threads.
class Philox {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform in (0, 1), never exactly 0 or 1.
  double uniform();

  // Standard normal draw (Marsaglia polar; deterministic on every platform).
  double normal();

  // Ten-round bijection; exposed for known-answer tests.
  static Counter block(Counter counter, Key key);

 private:
  void refill();

  Key key_;
  std::uint64_t block_index_ = 0;
  std::uint64_t stream_;
  Counter buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Derives an independent seed for a sub-experiment (e.g. one beta value of a
// sweep) so that sibling experiments do not share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Thread cap used by replica-parallel loops; 0 means hardware concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; the
// body must only write to slots owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dunkl
