#include "cqforge/rng.hpp"

#include <stdexcept>

namespace cqforge {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index) {
  // FNV-1a over the tag folds the stage name into the stream id.
  uint64_t h = 1469598103934665603ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(splitmix64(master ^ h) ^ index);
}

uint64_t DetRng::uniform_below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  if (n == 1) return 0;
  // Largest multiple of n that fits in 64 bits; draws at or above it would
  // bias the low residues, so they are rejected.
  uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  uint64_t v;
  do {
    v = eng_();
  } while (v > limit);
  return v % n;
}

double DetRng::uniform_unit() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::vector<size_t> DetRng::sample_indices(size_t n, size_t k) {
  if (k > n) throw std::invalid_argument("sample_indices: k exceeds n");
  // Partial Fisher-Yates over an index array.
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<size_t> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(uniform_below(n - i));
    std::swap(idx[i], idx[j]);
    out.push_back(idx[i]);
  }
  return out;
}

}  // namespace cqforge
