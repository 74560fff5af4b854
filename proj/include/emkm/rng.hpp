#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace emkm {

// Deterministic random source used by every sampling step in the library.
//
// std::mt19937_64 has a standard-specified output sequence, but the standard
// distributions do not, so all transforms (unit doubles, bounded integers,
// normal variates) are implemented here explicitly. Identical seeds therefore
// produce identical streams on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). Rejection sampling on the tail range.
  std::uint64_t next_index(std::uint64_t n);

  // Standard normal variate via the Marsaglia polar transform. Variates are
  // produced in pairs; the second of each pair is cached and returned next.
  double next_normal();

  // k distinct indices drawn uniformly from [0, n), in draw order
  // (partial Fisher-Yates). Requires k <= n.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_index(i)]);
    }
  }

  // Independent stream for a labelled sub-task (e.g. per-cluster generation).
  // Depends only on the original seed and the label, not on consumed state.
  Rng substream(std::uint64_t label) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// SplitMix64 finalizer, used to derive substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label);

}  // namespace emkm
