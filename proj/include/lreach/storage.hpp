#pragma once

#include <atomic>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>

#include "lreach/hashing.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace lreach {

enum class FindOrPut : std::uint8_t { kInserted, kFound, kTableFull };

/// Single-writer event counter. The owning worker bumps it with relaxed
/// load/store pairs; any thread may read a (possibly stale) value.
class EventCounter {
 public:
  void add(std::uint64_t n = 1) noexcept {
    value_.store(value_.load(std::memory_order_relaxed) + n, std::memory_order_relaxed);
  }
  void raise_to(std::uint64_t v) noexcept {
    if (v > value_.load(std::memory_order_relaxed)) value_.store(v, std::memory_order_relaxed);
  }
  std::uint64_t get() const noexcept { return value_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> value_{0};
};

/// Per-worker storage instrumentation, one cache line per worker.
struct alignas(64) StorageCounters {
  EventCounter fop_calls;
  EventCounter inserts;
  EventCounter lock_waits;
  EventCounter cas_failures;
  EventCounter probes_total;
  EventCounter max_probe;
  EventCounter rounds_exhausted;
};

/// Plain totals, merged from per-worker counters.
struct StorageStats {
  std::uint64_t fop_calls = 0;
  std::uint64_t inserts = 0;
  std::uint64_t lock_waits = 0;
  std::uint64_t cas_failures = 0;
  std::uint64_t probes_total = 0;
  std::uint64_t max_probe = 0;
  std::uint64_t rounds_exhausted = 0;

  StorageStats& operator+=(const StorageStats& o) noexcept;
  friend bool operator==(const StorageStats&, const StorageStats&) = default;
};

StorageStats snapshot_stats(const StorageCounters& counters) noexcept;
StorageStats snapshot_stats(std::span<const StorageCounters> per_worker) noexcept;

class TableFullError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#elif defined(__aarch64__)
  asm volatile("yield" ::: "memory");
#else
  std::this_thread::yield();
#endif
}

/// Bounded exponential backoff: up to 64 relax hints per round, and no
/// scheduler yield until 2^16 hints have been issued.
class SpinBackoff {
 public:
  static constexpr std::uint32_t kMaxBurst = 64;
  static constexpr std::uint64_t kYieldAfter = std::uint64_t{1} << 16;

  void pause() noexcept {
    if (spent_ >= kYieldAfter) {
      std::this_thread::yield();
      return;
    }
    for (std::uint32_t i = 0; i < burst_; ++i) cpu_relax();
    spent_ += burst_;
    if (burst_ < kMaxBurst) burst_ *= 2;
  }

 private:
  std::uint32_t burst_ = 1;
  std::uint64_t spent_ = 0;
};

/// A set of fixed-length state vectors shared by all workers.
template <class S>
concept SharedStorage = requires(S& s, const S& cs, StateView v, StorageCounters& c) {
  { s.find_or_put(v, c) } -> std::same_as<FindOrPut>;
  { cs.contains(v) } -> std::same_as<bool>;
  { cs.vector_len() } -> std::convertible_to<std::size_t>;
  { cs.capacity() } -> std::convertible_to<std::size_t>;
};

}  // namespace lreach
