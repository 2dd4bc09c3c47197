#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cqforge {

// Stateless 64-bit mixer used to derive independent sub-seeds.
uint64_t splitmix64(uint64_t x);

// Derives the seed for one unit of work from the master seed, a stage tag,
// and the unit's index. The result is independent of worker scheduling.
uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index);

// Deterministic random source. mt19937_64 output is pinned by the standard;
// the draw helpers below avoid std::uniform_int_distribution, whose mapping
// is implementation-defined, so streams are byte-identical everywhere.
class DetRng {
 public:
  explicit DetRng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, n). Rejection sampling over the top of the 64-bit range.
  uint64_t uniform_below(uint64_t n);

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_unit();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Picks k distinct indices from [0, n) without replacement, in draw order.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  std::mt19937_64 eng_;
};

}  // namespace cqforge
