#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lreach/frontier.hpp"
#include "lreach/model.hpp"
#include "lreach/storage.hpp"

namespace lreach {

inline constexpr std::size_t kMaxDeadlockSamples = 16;

/// Exploration counts accumulated by one worker.
struct Tally {
  std::uint64_t states = 0;       // vectors this worker committed to storage
  std::uint64_t transitions = 0;  // successors enumerated
  std::uint64_t deadlocks = 0;    // expanded states without successors
  std::vector<StateVector> deadlock_samples;

  void note_deadlock(StateView state) {
    ++deadlocks;
    if (deadlock_samples.size() < kMaxDeadlockSamples) {
      deadlock_samples.emplace_back(state.begin(), state.end());
    }
  }
  void merge(const Tally& other) {
    states += other.states;
    transitions += other.transitions;
    deadlocks += other.deadlocks;
    for (const auto& s : other.deadlock_samples) {
      if (deadlock_samples.size() >= kMaxDeadlockSamples) break;
      deadlock_samples.push_back(s);
    }
  }
};

enum class WorkStatus { kExhausted, kBudgetSpent };

/// Runs the body of the reachability loop against a shared storage: pop a
/// state, enumerate its successors, find-or-put each one and push those that
/// were inserted.
template <SharedStorage Storage>
class Expander {
 public:
  Expander(const Model& model, Storage& storage, SearchOrder order, StorageCounters& counters)
      : model_(model),
        storage_(storage),
        order_(order),
        counters_(counters),
        len_(model.vector_len()) {
    current_.reserve(len_);
    successors_.reserve(len_ * 64);
  }

  /// At most `budget` iterations. Throws TableFullError when the storage
  /// cannot place a successor.
  WorkStatus work(Frontier& frontier, std::size_t budget) {
    for (std::size_t i = 0; i < budget; ++i) {
      if (!frontier.pop(order_, current_)) return WorkStatus::kExhausted;
      successors_.clear();
      const std::size_t n = model_.next_states(current_, successors_);
      tally_.transitions += n;
      if (n == 0) tally_.note_deadlock(current_);
      for (std::size_t k = 0; k < n; ++k) {
        const StateView succ(successors_.data() + k * len_, len_);
        switch (storage_.find_or_put(succ, counters_)) {
          case FindOrPut::kInserted:
            ++tally_.states;
            frontier.push(succ);
            break;
          case FindOrPut::kFound:
            break;
          case FindOrPut::kTableFull:
            throw TableFullError("state storage full after " + std::to_string(tally_.states) +
                                 " inserts by this worker; increase --table-bits");
        }
      }
    }
    return frontier.empty() ? WorkStatus::kExhausted : WorkStatus::kBudgetSpent;
  }

  /// Commits a state that did not come from an expansion (the initial state).
  bool put_root(StateView state, Frontier& frontier) {
    const FindOrPut r = storage_.find_or_put(state, counters_);
    if (r == FindOrPut::kTableFull) throw TableFullError("state storage full at the root");
    if (r != FindOrPut::kInserted) return false;
    ++tally_.states;
    frontier.push(state);
    return true;
  }

  Tally& tally() noexcept { return tally_; }

 private:
  const Model& model_;
  Storage& storage_;
  SearchOrder order_;
  StorageCounters& counters_;
  std::size_t len_;
  StateVector current_;
  std::vector<StateWord> successors_;
  Tally tally_;
};

}  // namespace lreach
