#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "lreach/expand.hpp"
#include "lreach/frontier.hpp"
#include "lreach/model.hpp"
#include "lreach/storage.hpp"

namespace lreach {

enum class BalanceStrategy { kStatic, kSrp };

inline constexpr std::size_t kDefaultSeedFactor = 4;
inline constexpr std::size_t kDefaultWorkBudget = 64;

struct BalanceStats {
  std::uint64_t polls = 0;
  std::uint64_t handoffs = 0;
  std::uint64_t denials = 0;
  std::uint64_t states_given = 0;

  BalanceStats& operator+=(const BalanceStats& o) noexcept {
    polls += o.polls;
    handoffs += o.handoffs;
    denials += o.denials;
    states_given += o.states_given;
    return *this;
  }
};

/// Counts busy workers plus handoffs that have been published but not yet
/// picked up. Work can only exist inside a busy worker or a pending handoff,
/// and only busy workers create handoffs, so once the count reaches zero it
/// stays there and no work is left anywhere.
class TerminationDetector {
 public:
  /// All workers start busy.
  explicit TerminationDetector(std::size_t workers) noexcept
      : active_(static_cast<std::int64_t>(workers)) {}

  void worker_idle() noexcept { active_.fetch_sub(1, std::memory_order_acq_rel); }
  /// Called by a busy worker before it publishes `n` handoffs.
  void add_pending(std::int64_t n = 1) noexcept {
    active_.fetch_add(n, std::memory_order_acq_rel);
  }
  /// Called by a busy worker after absorbing `n` handoffs into its own work.
  void retire_pending(std::int64_t n = 1) noexcept {
    active_.fetch_sub(n, std::memory_order_acq_rel);
  }
  bool terminated() const noexcept { return active_.load(std::memory_order_acquire) == 0; }
  std::int64_t active() const noexcept { return active_.load(std::memory_order_acquire); }

 private:
  alignas(64) std::atomic<std::int64_t> active_;
};

inline bool detect_termination(const TerminationDetector& detector) noexcept {
  return detector.terminated();
}

/// Poll mailboxes for synchronous random polling. A worker has at most one
/// outstanding request and receives at most one request at a time.
class PollBoard {
 public:
  enum class Reply : int { kNone, kWaiting, kGranted, kDenied };
  enum class Outcome { kHandoff, kDenied, kTerminated };

  PollBoard(std::size_t workers, std::size_t vector_len);

  std::size_t workers() const noexcept { return slots_.size(); }

  /// Donor side, called at balance points: answers a pending request with
  /// half of `frontier` (when it holds >= 2 states) or a denial. Returns the
  /// number of states handed off.
  std::size_t answer(std::size_t self, Frontier& frontier, TerminationDetector& term,
                     BalanceStats& stats);

  /// Idle side: polls one uniformly chosen peer and waits for its answer,
  /// denying requests addressed to `self` meanwhile. On kHandoff the gift is
  /// appended to `frontier` and the caller owns the busy token created by
  /// the donor.
  Outcome poll_random(std::size_t self, Frontier& frontier, std::mt19937_64& rng,
                      TerminationDetector& term, const std::atomic<bool>& abort,
                      BalanceStats& stats);

 private:
  struct alignas(64) Slot {
    explicit Slot(std::size_t vector_len) : gift(vector_len) {}
    std::atomic<int> requester{-1};
    std::atomic<Reply> reply{Reply::kNone};
    Frontier gift;
  };

  std::vector<std::unique_ptr<Slot>> slots_;
};

struct SeedResult {
  std::vector<Frontier> frontiers;
  Tally tally;
};

/// Static load balancing: a bounded sequential BFS from the initial state
/// until the open set holds workers * seed_factor states, then the open
/// states are dealt round-robin. A single worker just gets the initial state.
/// The BFS also stops after workers * seed_factor * 16 expansions so narrow
/// state spaces are not explored entirely by the seeding thread.
template <SharedStorage Storage>
SeedResult static_seed(const Model& model, Storage& storage, std::size_t workers,
                       StorageCounters& counters,
                       std::size_t seed_factor = kDefaultSeedFactor) {
  const std::size_t len = model.vector_len();
  Expander<Storage> expander(model, storage, SearchOrder::kBfs, counters);
  Frontier open(len);
  expander.put_root(model.initial_state(), open);

  if (workers > 1) {
    const std::size_t target = workers * seed_factor;
    const std::size_t cap = target * 16;
    for (std::size_t expansions = 0; !open.empty() && open.size() < target && expansions < cap;
         ++expansions) {
      expander.work(open, 1);
    }
  }

  SeedResult result;
  result.frontiers.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) result.frontiers.emplace_back(len);
  for (std::size_t i = 0; i < open.size(); ++i) result.frontiers[i % workers].push(open.at(i));
  result.tally = std::move(expander.tally());
  return result;
}

/// Dynamic balancing start: worker 0 holds the initial state, everyone else
/// starts idle and polls.
template <SharedStorage Storage>
SeedResult root_seed(const Model& model, Storage& storage, std::size_t workers,
                     StorageCounters& counters) {
  const std::size_t len = model.vector_len();
  Expander<Storage> expander(model, storage, SearchOrder::kBfs, counters);
  SeedResult result;
  result.frontiers.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) result.frontiers.emplace_back(len);
  expander.put_root(model.initial_state(), result.frontiers[0]);
  result.tally = std::move(expander.tally());
  return result;
}

}  // namespace lreach
