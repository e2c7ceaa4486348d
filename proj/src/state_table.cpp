#include "lreach/state_table.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lreach {

StorageStats& StorageStats::operator+=(const StorageStats& o) noexcept {
  fop_calls += o.fop_calls;
  inserts += o.inserts;
  lock_waits += o.lock_waits;
  cas_failures += o.cas_failures;
  probes_total += o.probes_total;
  max_probe = std::max(max_probe, o.max_probe);
  rounds_exhausted += o.rounds_exhausted;
  return *this;
}

StorageStats snapshot_stats(const StorageCounters& c) noexcept {
  StorageStats s;
  s.fop_calls = c.fop_calls.get();
  s.inserts = c.inserts.get();
  s.lock_waits = c.lock_waits.get();
  s.cas_failures = c.cas_failures.get();
  s.probes_total = c.probes_total.get();
  s.max_probe = c.max_probe.get();
  s.rounds_exhausted = c.rounds_exhausted.get();
  return s;
}

StorageStats snapshot_stats(std::span<const StorageCounters> per_worker) noexcept {
  StorageStats total;
  for (const auto& c : per_worker) total += snapshot_stats(c);
  return total;
}

namespace {

TableGeometry checked_geometry(unsigned bits, std::size_t vector_len, unsigned line_slots) {
  if (bits < StateTable::kMinBits || bits > StateTable::kMaxBits) {
    throw std::invalid_argument("table bits must be in [" + std::to_string(StateTable::kMinBits) +
                                ", " + std::to_string(StateTable::kMaxBits) + "], got " +
                                std::to_string(bits));
  }
  if (vector_len == 0) throw std::invalid_argument("vector_len must be >= 1");
  return TableGeometry(bits, line_slots);
}

}  // namespace

StateTable::StateTable(unsigned bits, std::size_t vector_len, unsigned line_slots,
                       std::uint64_t salt)
    : geom_(checked_geometry(bits, vector_len, line_slots)),
      vector_len_(vector_len),
      max_rounds_(max_rounds_for(line_slots)),
      salt_(salt),
      buckets_(std::make_unique<std::atomic<std::uint64_t>[]>(geom_.size())),
      data_(std::make_unique<StateWord[]>(geom_.size() * vector_len)) {}

std::uint64_t StateTable::wait_for_done(std::size_t slot,
                                        StorageCounters* counters) const noexcept {
  if (counters) counters->lock_waits.add();
  SpinBackoff backoff;
  std::uint64_t word = buckets_[slot].load(std::memory_order_acquire);
  while ((word & kDoneBit) == 0) {
    backoff.pause();
    word = buckets_[slot].load(std::memory_order_acquire);
  }
  return word;
}

FindOrPut StateTable::find_or_put(StateView vector, StorageCounters& counters) noexcept {
  counters.fop_calls.add();

  HashDigest digest = hash(vector, 1, salt_);
  const std::uint64_t memo = memo_of(digest);
  const std::uint64_t write_word = memo << 1;
  const std::uint64_t done_word = write_word | kDoneBit;
  std::uint64_t probes = 0;

  auto finish = [&](FindOrPut r) {
    counters.probes_total.add(probes);
    counters.max_probe.raise_to(probes);
    return r;
  };

  for (unsigned round = 1; round <= max_rounds_; ++round) {
    if (round > 1) digest = hash(vector, round, salt_);
    const LineWalk line = walk_the_line(index_of(digest, geom_), geom_);
    for (unsigned i = 0; i < line.size(); ++i) {
      const std::size_t slot = line[i];
      auto& bucket = buckets_[slot];
      ++probes;

      std::uint64_t word = bucket.load(std::memory_order_acquire);
      if (word == kEmpty) {
        if (bucket.compare_exchange_strong(word, write_word, std::memory_order_acq_rel,
                                           std::memory_order_acquire)) {
          std::copy(vector.begin(), vector.end(), data_.get() + slot * vector_len_);
          bucket.store(done_word, std::memory_order_release);
          counters.inserts.add();
          return finish(FindOrPut::kInserted);
        }
        // Lost the race; `word` now holds the winner's claim.
        counters.cas_failures.add();
      }
      if ((word >> 1) == memo) {
        if ((word & kDoneBit) == 0) word = wait_for_done(slot, &counters);
        if (std::equal(vector.begin(), vector.end(), data_.get() + slot * vector_len_)) {
          return finish(FindOrPut::kFound);
        }
      }
    }
  }
  counters.rounds_exhausted.add();
  return finish(FindOrPut::kTableFull);
}

bool StateTable::contains(StateView vector, StorageCounters* counters) const noexcept {
  HashDigest digest = hash(vector, 1, salt_);
  const std::uint64_t memo = memo_of(digest);
  std::uint64_t probes = 0;

  auto finish = [&](bool r) {
    if (counters) {
      counters->probes_total.add(probes);
      counters->max_probe.raise_to(probes);
    }
    return r;
  };

  for (unsigned round = 1; round <= max_rounds_; ++round) {
    if (round > 1) digest = hash(vector, round, salt_);
    const LineWalk line = walk_the_line(index_of(digest, geom_), geom_);
    for (unsigned i = 0; i < line.size(); ++i) {
      const std::size_t slot = line[i];
      ++probes;
      std::uint64_t word = buckets_[slot].load(std::memory_order_acquire);
      // An insert of this vector would have claimed the first empty slot.
      if (word == kEmpty) return finish(false);
      if ((word >> 1) == memo) {
        if ((word & kDoneBit) == 0) word = wait_for_done(slot, counters);
        if (std::equal(vector.begin(), vector.end(), data_.get() + slot * vector_len_)) {
          return finish(true);
        }
      }
    }
  }
  return finish(false);
}

std::size_t StateTable::count_done() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < geom_.size(); ++i) {
    if (buckets_[i].load(std::memory_order_acquire) & kDoneBit) ++n;
  }
  return n;
}

std::size_t StateTable::footprint_bytes() const noexcept {
  return geom_.size() * (sizeof(std::uint64_t) + vector_len_ * sizeof(StateWord));
}

}  // namespace lreach
