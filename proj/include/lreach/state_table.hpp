#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "lreach/hashing.hpp"
#include "lreach/storage.hpp"

namespace lreach {

/// The slots of the cache line containing `index`, starting at `index` and
/// wrapping at the line boundary.
class LineWalk {
 public:
  LineWalk(std::size_t index, unsigned line_slots) noexcept
      : index_(index), start_(index & ~(std::size_t{line_slots} - 1)), line_slots_(line_slots) {}

  std::size_t operator[](unsigned i) const noexcept {
    return start_ + ((index_ - start_ + i) & (line_slots_ - 1));
  }
  unsigned size() const noexcept { return line_slots_; }
  std::size_t line_start() const noexcept { return start_; }

 private:
  std::size_t index_;
  std::size_t start_;
  unsigned line_slots_;
};

inline LineWalk walk_the_line(std::size_t index, const TableGeometry& geom) noexcept {
  return LineWalk(index, geom.line_slots());
}

/// Probe budget shared by all line widths: 1024 rounds of 8-slot lines.
inline constexpr std::size_t kMaxProbeSlots = 8192;

inline unsigned max_rounds_for(unsigned line_slots) noexcept {
  const std::size_t rounds = kMaxProbeSlots / line_slots;
  return static_cast<unsigned>(rounds == 0 ? 1 : rounds);
}

/// Lockless find-or-put set of fixed-length vectors.
///
/// Buckets hold one atomic word each: 0 (empty), memo|write, or memo|done.
/// A bucket is claimed by CAS from empty to memo|write, the vector is copied
/// into the separate data array, and memo|done is published with a release
/// store. A bucket never returns to empty and its memo never changes, so the
/// probe sequence of every vector is fixed once inserted. All memory is
/// allocated by the constructor.
class StateTable {
 public:
  static constexpr unsigned kMinBits = 4;
  static constexpr unsigned kMaxBits = 34;
  static constexpr std::uint64_t kEmpty = 0;
  static constexpr std::uint64_t kDoneBit = 1;

  /// Throws std::invalid_argument for bits outside [kMinBits, kMaxBits] or a
  /// zero vector_len, std::bad_alloc if the arrays cannot be allocated.
  StateTable(unsigned bits, std::size_t vector_len, unsigned line_slots = kDefaultLineSlots,
             std::uint64_t salt = 0);

  StateTable(const StateTable&) = delete;
  StateTable& operator=(const StateTable&) = delete;

  FindOrPut find_or_put(StateView vector, StorageCounters& counters) noexcept;

  bool contains(StateView vector) const noexcept { return contains(vector, nullptr); }
  /// Read-only probe; records probe counts into `counters` when non-null.
  bool contains(StateView vector, StorageCounters* counters) const noexcept;

  const TableGeometry& geometry() const noexcept { return geom_; }
  std::size_t vector_len() const noexcept { return vector_len_; }
  std::size_t capacity() const noexcept { return geom_.size(); }
  unsigned max_rounds() const noexcept { return max_rounds_; }
  std::uint64_t salt() const noexcept { return salt_; }

  std::uint64_t bucket_word(std::size_t slot) const noexcept {
    return buckets_[slot].load(std::memory_order_acquire);
  }
  /// Only meaningful once bucket_word(slot) has the done bit set.
  StateView data_at(std::size_t slot) const noexcept {
    return {data_.get() + slot * vector_len_, vector_len_};
  }

  /// Number of done buckets. Linear scan.
  std::size_t count_done() const noexcept;

  /// Bytes held by the bucket and data arrays.
  std::size_t footprint_bytes() const noexcept;

 private:
  std::uint64_t wait_for_done(std::size_t slot, StorageCounters* counters) const noexcept;

  TableGeometry geom_;
  std::size_t vector_len_;
  unsigned max_rounds_;
  std::uint64_t salt_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> buckets_;
  std::unique_ptr<StateWord[]> data_;
};

}  // namespace lreach
