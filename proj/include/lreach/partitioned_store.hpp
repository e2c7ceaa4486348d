#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "lreach/hashing.hpp"
#include "lreach/state_table.hpp"
#include "lreach/storage.hpp"

namespace lreach {

/// Worker that owns `vector` under static partitioning.
std::size_t owner_of(StateView vector, std::size_t workers) noexcept;

/// Static state-space partitioning: every vector belongs to one worker, which
/// alone keeps it in a private set. Other workers hand vectors to the owner
/// through a bounded multi-producer/single-consumer inbound queue.
class PartitionedStore {
 public:
  static constexpr std::size_t kDefaultQueueCapacity = std::size_t{1} << 16;
  /// Private tables use a different hash family than owner_of.
  static constexpr std::uint64_t kPrivateSalt = 0x243f6a8885a308d3ULL;

  enum class Submit : std::uint8_t { kQueued, kFull };

  struct DrainResult {
    std::size_t fresh = 0;    // vectors new to the owner, appended to `out`
    std::size_t batches = 0;  // submit calls consumed
    bool table_full = false;
  };

  /// Each private table gets `private_bits` bits. Queue capacity is in vectors.
  PartitionedStore(std::size_t workers, std::size_t vector_len, unsigned private_bits,
                   std::size_t queue_capacity = kDefaultQueueCapacity);

  std::size_t workers() const noexcept { return parts_.size(); }
  std::size_t vector_len() const noexcept { return vector_len_; }
  std::size_t queue_capacity() const noexcept { return queue_capacity_; }

  /// Routes one vector to its owner's queue.
  Submit submit(StateView vector);
  /// Enqueues a flat batch of vectors (all owned by `owner`) as one unit.
  Submit submit_batch(std::size_t owner, std::span<const StateWord> flat);

  /// Owner-only: tests queued vectors against the private set and appends the
  /// new ones (flat) to `out`.
  DrainResult drain(std::size_t worker, std::vector<StateWord>& out);

  /// Owner-only direct insert into the private set.
  FindOrPut put_local(std::size_t worker, StateView vector);

  bool contains(StateView vector) const;
  std::size_t queued(std::size_t worker) const;
  std::size_t stored(std::size_t worker) const { return parts_[worker]->table.count_done(); }

  StorageCounters& counters(std::size_t worker) noexcept { return parts_[worker]->counters; }
  const StorageCounters& counters(std::size_t worker) const noexcept {
    return parts_[worker]->counters;
  }

 private:
  struct Part {
    Part(unsigned bits, std::size_t vector_len)
        : table(bits, vector_len, kDefaultLineSlots, kPrivateSalt) {}
    StateTable table;
    StorageCounters counters;
    mutable std::mutex mu;
    std::vector<StateWord> inbox;
    std::vector<StateWord> spare;
    std::size_t batches = 0;
  };

  std::size_t vector_len_;
  std::size_t queue_capacity_;
  std::vector<std::unique_ptr<Part>> parts_;
};

}  // namespace lreach
