#include "lreach/region_table.hpp"

#include <algorithm>
#include <stdexcept>

#include "lreach/state_table.hpp"

namespace lreach {

namespace {
constexpr std::size_t kNoRegion = ~std::size_t{0};
constexpr std::uint64_t kDoneBit = StateTable::kDoneBit;
}  // namespace

// Holds at most one region lock; moving to a slot in another region
// releases the current lock before taking the next one.
class RegionLockedTable::RegionGuard {
 public:
  RegionGuard(const RegionLockedTable& table, StorageCounters* counters) noexcept
      : table_(table), counters_(counters) {}
  ~RegionGuard() { release(); }

  void cover(std::size_t slot) noexcept {
    const std::size_t r = table_.region_of(slot);
    if (r == held_) return;
    release();
    table_.lock(r, counters_);
    held_ = r;
  }
  void release() noexcept {
    if (held_ != kNoRegion) table_.unlock(held_);
    held_ = kNoRegion;
  }

 private:
  const RegionLockedTable& table_;
  StorageCounters* counters_;
  std::size_t held_ = kNoRegion;
};

RegionLockedTable::RegionLockedTable(unsigned bits, std::size_t vector_len, unsigned line_slots,
                                     unsigned region_bits)
    : geom_(bits, line_slots),
      vector_len_(vector_len),
      max_rounds_(max_rounds_for(line_slots)),
      region_bits_(std::min(region_bits, bits)) {
  if (bits < StateTable::kMinBits || bits > StateTable::kMaxBits) {
    throw std::invalid_argument("table bits out of range");
  }
  if (vector_len == 0) throw std::invalid_argument("vector_len must be >= 1");
  buckets_ = std::make_unique<std::atomic<std::uint64_t>[]>(geom_.size());
  data_ = std::make_unique<StateWord[]>(geom_.size() * vector_len_);
  locks_ = std::make_unique<std::atomic_flag[]>(regions());
}

void RegionLockedTable::lock(std::size_t region, StorageCounters* counters) const noexcept {
  auto& flag = locks_[region];
  if (!flag.test_and_set(std::memory_order_acquire)) return;
  if (counters) counters->lock_waits.add();
  SpinBackoff backoff;
  do {
    while (flag.test(std::memory_order_relaxed)) backoff.pause();
  } while (flag.test_and_set(std::memory_order_acquire));
}

void RegionLockedTable::unlock(std::size_t region) const noexcept {
  locks_[region].clear(std::memory_order_release);
}

FindOrPut RegionLockedTable::find_or_put(StateView vector, StorageCounters& counters) noexcept {
  counters.fop_calls.add();
  HashDigest digest = hash(vector, 1);
  const std::uint64_t memo = memo_of(digest);
  const std::uint64_t done_word = (memo << 1) | kDoneBit;
  std::uint64_t probes = 0;
  RegionGuard guard(*this, &counters);

  auto finish = [&](FindOrPut r) {
    counters.probes_total.add(probes);
    counters.max_probe.raise_to(probes);
    return r;
  };

  for (unsigned round = 1; round <= max_rounds_; ++round) {
    if (round > 1) digest = hash(vector, round);
    const std::size_t index = index_of(digest, geom_);
    const std::size_t start = index & ~(std::size_t{geom_.line_slots()} - 1);
    for (unsigned i = 0; i < geom_.line_slots(); ++i) {
      const std::size_t slot = start + ((index - start + i) & (geom_.line_slots() - 1));
      ++probes;
      guard.cover(slot);
      auto& bucket = buckets_[slot];
      const std::uint64_t word = bucket.load(std::memory_order_relaxed);
      StateWord* cell = data_.get() + slot * vector_len_;
      if (word == 0) {
        std::copy(vector.begin(), vector.end(), cell);
        bucket.store(done_word, std::memory_order_release);
        counters.inserts.add();
        return finish(FindOrPut::kInserted);
      }
      if (word == done_word && std::equal(vector.begin(), vector.end(), cell)) {
        return finish(FindOrPut::kFound);
      }
    }
  }
  counters.rounds_exhausted.add();
  return finish(FindOrPut::kTableFull);
}

bool RegionLockedTable::contains(StateView vector) const noexcept {
  HashDigest digest = hash(vector, 1);
  const std::uint64_t done_word = (memo_of(digest) << 1) | kDoneBit;
  RegionGuard guard(*this, nullptr);
  for (unsigned round = 1; round <= max_rounds_; ++round) {
    if (round > 1) digest = hash(vector, round);
    const std::size_t index = index_of(digest, geom_);
    const std::size_t start = index & ~(std::size_t{geom_.line_slots()} - 1);
    for (unsigned i = 0; i < geom_.line_slots(); ++i) {
      const std::size_t slot = start + ((index - start + i) & (geom_.line_slots() - 1));
      guard.cover(slot);
      const std::uint64_t word = buckets_[slot].load(std::memory_order_relaxed);
      if (word == 0) return false;
      if (word == done_word &&
          std::equal(vector.begin(), vector.end(), data_.get() + slot * vector_len_)) {
        return true;
      }
    }
  }
  return false;
}

std::size_t RegionLockedTable::count_done() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < geom_.size(); ++i) {
    if (buckets_[i].load(std::memory_order_acquire) != 0) ++n;
  }
  return n;
}

}  // namespace lreach
