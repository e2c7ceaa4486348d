#include "lreach/hashing.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace lreach {

TableGeometry::TableGeometry(unsigned bits, unsigned line_slots)
    : bits_(bits), line_slots_(line_slots) {
  if (bits > kMaxBits) {
    throw std::invalid_argument("table bits " + std::to_string(bits) + " exceeds " +
                                std::to_string(kMaxBits));
  }
  if (line_slots == 0 || !std::has_single_bit(line_slots) || line_slots > size()) {
    throw std::invalid_argument("line_slots must be a power of two dividing the table size");
  }
}

namespace {

constexpr std::uint64_t kMul = 0xc6a4a7935bd1e995ULL;
constexpr int kShift = 47;

constexpr std::uint64_t fmix64(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

std::uint64_t hash_words(StateView vector, std::uint64_t seed) noexcept {
  const std::size_t n = vector.size();
  std::uint64_t h = seed ^ (static_cast<std::uint64_t>(n) * 4 * kMul);

  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    std::uint64_t k = static_cast<std::uint64_t>(vector[i]) |
                      (static_cast<std::uint64_t>(vector[i + 1]) << 32);
    k *= kMul;
    k ^= k >> kShift;
    k *= kMul;
    h ^= k;
    h *= kMul;
  }
  if (i < n) {
    h ^= static_cast<std::uint64_t>(vector[i]);
    h *= kMul;
  }

  h ^= h >> kShift;
  h *= kMul;
  h ^= h >> kShift;
  // The final avalanche spreads entropy into both the low (index) and high
  // (memo) bits.
  return fmix64(h);
}

std::uint64_t round_seed(unsigned round, std::uint64_t salt) noexcept {
  // splitmix64 step over (round, salt)
  std::uint64_t z = salt + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(round) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HashDigest hash(StateView vector, unsigned round, std::uint64_t salt) noexcept {
  return HashDigest{hash_words(vector, round_seed(round, salt)), round};
}

}  // namespace lreach
