#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "lreach/hashing.hpp"
#include "lreach/storage.hpp"

namespace lreach {

/// Shared find-or-put table guarded by region spinlocks: lock r covers the
/// contiguous slot range [r * size / R, (r + 1) * size / R). Same hashing,
/// memo and probe sequence as StateTable, so a single worker places every
/// vector in the same slot either table would.
class RegionLockedTable {
 public:
  static constexpr unsigned kDefaultRegionBits = 10;

  /// `region_bits` is clamped to the table bits.
  RegionLockedTable(unsigned bits, std::size_t vector_len,
                    unsigned line_slots = kDefaultLineSlots,
                    unsigned region_bits = kDefaultRegionBits);

  RegionLockedTable(const RegionLockedTable&) = delete;
  RegionLockedTable& operator=(const RegionLockedTable&) = delete;

  FindOrPut find_or_put(StateView vector, StorageCounters& counters) noexcept;
  bool contains(StateView vector) const noexcept;

  const TableGeometry& geometry() const noexcept { return geom_; }
  std::size_t vector_len() const noexcept { return vector_len_; }
  std::size_t capacity() const noexcept { return geom_.size(); }
  std::size_t regions() const noexcept { return std::size_t{1} << region_bits_; }
  std::size_t region_of(std::size_t slot) const noexcept {
    return slot >> (geom_.bits() - region_bits_);
  }

  std::uint64_t bucket_word(std::size_t slot) const noexcept {
    return buckets_[slot].load(std::memory_order_acquire);
  }
  std::size_t count_done() const noexcept;

 private:
  class RegionGuard;

  void lock(std::size_t region, StorageCounters* counters) const noexcept;
  void unlock(std::size_t region) const noexcept;

  TableGeometry geom_;
  std::size_t vector_len_;
  unsigned max_rounds_;
  unsigned region_bits_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> buckets_;
  std::unique_ptr<StateWord[]> data_;
  std::unique_ptr<std::atomic_flag[]> locks_;
};

}  // namespace lreach
