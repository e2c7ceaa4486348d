#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lreach {

using StateWord = std::uint32_t;
using StateVector = std::vector<StateWord>;
using StateView = std::span<const StateWord>;

// Bucket word layout: bit 0 is the done flag, bits 1..63 hold the memo.
// The all-zero word is the empty bucket.
inline constexpr unsigned kBucketWordBits = 64;
inline constexpr unsigned kCacheLineBytes = 64;
inline constexpr unsigned kDefaultLineSlots = kCacheLineBytes / (kBucketWordBits / 8);
inline constexpr unsigned kMemoBits = kBucketWordBits - 1;

/// Power-of-two table shape plus the number of bucket slots per cache line.
class TableGeometry {
 public:
  static constexpr unsigned kMaxBits = 40;

  /// Throws std::invalid_argument unless bits <= kMaxBits and line_slots is a
  /// power of two no larger than the table.
  explicit TableGeometry(unsigned bits, unsigned line_slots = kDefaultLineSlots);

  unsigned bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return std::size_t{1} << bits_; }
  std::size_t mask() const noexcept { return size() - 1; }
  unsigned line_slots() const noexcept { return line_slots_; }

 private:
  unsigned bits_;
  unsigned line_slots_;
};

struct HashDigest {
  std::uint64_t value = 0;
  unsigned round = 1;

  friend bool operator==(const HashDigest&, const HashDigest&) = default;
};

/// 64-bit MurmurHash64A-style mix over the vector's 32-bit words.
std::uint64_t hash_words(StateView vector, std::uint64_t seed) noexcept;

/// Seed used for double-hashing round `round` (>= 1). `salt` selects an
/// independent hash family, e.g. for per-worker private tables.
std::uint64_t round_seed(unsigned round, std::uint64_t salt = 0) noexcept;

HashDigest hash(StateView vector, unsigned round, std::uint64_t salt = 0) noexcept;

/// The n least-significant bits of the digest.
inline std::size_t index_of(HashDigest digest, const TableGeometry& geom) noexcept {
  return static_cast<std::size_t>(digest.value) & geom.mask();
}

/// High kMemoBits of the digest; 0 is remapped to 1 so an occupied bucket
/// word is never the empty encoding.
inline std::uint64_t memo_of(HashDigest digest) noexcept {
  const std::uint64_t memo = digest.value >> (64 - kMemoBits);
  return memo == 0 ? 1 : memo;
}

struct VectorHasher {
  std::size_t operator()(const StateVector& v) const noexcept {
    return static_cast<std::size_t>(hash_words(v, 0x5bd1e995u));
  }
};

}  // namespace lreach
