#include "lreach/reachability.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace lreach {

std::string_view to_string(StorageKind kind) noexcept {
  switch (kind) {
    case StorageKind::kLockless: return "lockless";
    case StorageKind::kRegion: return "region";
    case StorageKind::kPartitioned: return "partitioned";
  }
  return "?";
}

std::string_view to_string(SearchOrder order) noexcept {
  return order == SearchOrder::kBfs ? "bfs" : "dfs";
}

std::string_view to_string(BalanceStrategy lb) noexcept {
  return lb == BalanceStrategy::kStatic ? "static" : "srp";
}

StorageKind parse_storage_kind(std::string_view name) {
  if (name == "lockless") return StorageKind::kLockless;
  if (name == "region") return StorageKind::kRegion;
  if (name == "partitioned") return StorageKind::kPartitioned;
  throw std::invalid_argument("unknown storage '" + std::string(name) + "'");
}

SearchOrder parse_search_order(std::string_view name) {
  if (name == "bfs") return SearchOrder::kBfs;
  if (name == "dfs") return SearchOrder::kDfs;
  throw std::invalid_argument("unknown order '" + std::string(name) + "'");
}

BalanceStrategy parse_balance(std::string_view name) {
  if (name == "static") return BalanceStrategy::kStatic;
  if (name == "srp") return BalanceStrategy::kSrp;
  throw std::invalid_argument("unknown load balancer '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Backoff for idle workers: a few yields, then sleeps doubling up to 1 ms.
class IdleBackoff {
 public:
  void wait() {
    if (yields_ < 16) {
      ++yields_;
      std::this_thread::yield();
      return;
    }
    std::this_thread::sleep_for(delay_);
    delay_ = std::min(delay_ * 2, std::chrono::microseconds(1000));
  }
  void reset() {
    yields_ = 0;
    delay_ = std::chrono::microseconds(1);
  }

 private:
  unsigned yields_ = 0;
  std::chrono::microseconds delay_{1};
};

// First error wins; everyone else stops at the next check.
class AbortFlag {
 public:
  void raise(const std::string& what) {
    std::lock_guard lock(mu_);
    if (!message_.empty()) return;
    message_ = what;
    flag_.store(true, std::memory_order_release);
  }
  bool raised() const noexcept { return flag_.load(std::memory_order_acquire); }
  const std::atomic<bool>& flag() const noexcept { return flag_; }
  std::string message() const {
    std::lock_guard lock(mu_);
    return message_;
  }

 private:
  std::atomic<bool> flag_{false};
  mutable std::mutex mu_;
  std::string message_;
};

struct WorkerResult {
  Tally tally;
  BalanceStats balance;
};

ExploreReport assemble(const Model& model, StorageKind kind, const ExploreConfig& config,
                       Tally seed_tally, std::vector<WorkerResult>& results,
                       std::vector<StorageStats> per_worker, double wall_ms) {
  ExploreReport report;
  report.model = model.name();
  report.storage = kind;
  report.workers = config.workers;
  report.order = config.order;
  report.lb = config.lb;
  Tally total = std::move(seed_tally);
  for (auto& r : results) {
    total.merge(r.tally);
    report.balance += r.balance;
  }
  report.states = total.states;
  report.transitions = total.transitions;
  report.deadlocks = total.deadlocks;
  report.deadlock_samples = std::move(total.deadlock_samples);
  report.wall_ms = wall_ms;
  report.per_worker = std::move(per_worker);
  for (const auto& s : report.per_worker) report.totals += s;
  return report;
}

template <SharedStorage Storage>
StorageKind kind_of();
template <>
StorageKind kind_of<StateTable>() {
  return StorageKind::kLockless;
}
template <>
StorageKind kind_of<RegionLockedTable>() {
  return StorageKind::kRegion;
}

void validate(const Model& model, std::size_t storage_len, const ExploreConfig& config) {
  if (config.workers == 0) throw std::invalid_argument("workers must be >= 1");
  if (config.budget == 0) throw std::invalid_argument("work budget must be >= 1");
  if (storage_len != model.vector_len()) {
    throw std::invalid_argument("storage vector length " + std::to_string(storage_len) +
                                " does not match model vector length " +
                                std::to_string(model.vector_len()));
  }
}

}  // namespace

template <SharedStorage Storage>
ExploreReport explore(const Model& model, Storage& storage, const ExploreConfig& config) {
  validate(model, storage.vector_len(), config);
  const std::size_t workers = config.workers;
  const bool dynamic = config.lb == BalanceStrategy::kSrp;

  std::vector<StorageCounters> counters(workers);
  std::vector<WorkerResult> results(workers);
  AbortFlag abort;
  const auto start = Clock::now();

  SeedResult seed;
  try {
    seed = dynamic ? root_seed(model, storage, workers, counters[0])
                   : static_seed(model, storage, workers, counters[0], config.seed_factor);
  } catch (const TableFullError& e) {
    throw ExploreError(e.what(), assemble(model, kind_of<Storage>(), config, {}, results,
                                          {snapshot_stats(counters[0])}, ms_since(start)));
  }

  TerminationDetector term(workers);
  PollBoard board(workers, model.vector_len());

  auto run = [&](std::size_t self) {
    Frontier frontier = std::move(seed.frontiers[self]);
    Expander<Storage> expander(model, storage, config.order, counters[self]);
    std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ULL + self);
    BalanceStats& bstats = results[self].balance;
    IdleBackoff backoff;
    try {
      while (!abort.raised()) {
        if (!frontier.empty()) {
          expander.work(frontier, config.budget);
          if (dynamic) board.answer(self, frontier, term, bstats);
          continue;
        }
        term.worker_idle();
        bool resumed = false;
        backoff.reset();
        while (!resumed && !term.terminated() && !abort.raised()) {
          if (!dynamic) {
            backoff.wait();
            continue;
          }
          switch (board.poll_random(self, frontier, rng, term, abort.flag(), bstats)) {
            case PollBoard::Outcome::kHandoff:
              resumed = true;
              break;
            case PollBoard::Outcome::kDenied:
              board.answer(self, frontier, term, bstats);
              backoff.wait();
              break;
            case PollBoard::Outcome::kTerminated:
              break;
          }
        }
        if (!resumed) break;
      }
    } catch (const std::exception& e) {
      abort.raise(e.what());
    }
    results[self].tally = std::move(expander.tally());
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  const double wall = ms_since(start);

  std::vector<StorageStats> per_worker;
  per_worker.reserve(workers);
  for (const auto& c : counters) per_worker.push_back(snapshot_stats(c));
  ExploreReport report = assemble(model, kind_of<Storage>(), config, std::move(seed.tally),
                                  results, std::move(per_worker), wall);
  if (abort.raised()) throw ExploreError(abort.message(), std::move(report));
  return report;
}

template ExploreReport explore<StateTable>(const Model&, StateTable&, const ExploreConfig&);
template ExploreReport explore<RegionLockedTable>(const Model&, RegionLockedTable&,
                                                  const ExploreConfig&);

ExploreReport explore_partitioned(const Model& model, PartitionedStore& store,
                                  const ExploreConfig& config) {
  validate(model, store.vector_len(), config);
  if (config.workers != store.workers()) {
    throw std::invalid_argument("partitioned store has " + std::to_string(store.workers()) +
                                " partitions, config asks for " +
                                std::to_string(config.workers) + " workers");
  }
  const std::size_t workers = config.workers;
  const std::size_t len = model.vector_len();
  constexpr std::size_t kBatchStates = 64;

  std::vector<WorkerResult> results(workers);
  std::vector<Frontier> seeds;
  seeds.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) seeds.emplace_back(len);

  AbortFlag abort;
  const auto start = Clock::now();
  Tally seed_tally;
  {
    const StateVector init = model.initial_state();
    const std::size_t owner = owner_of(init, workers);
    if (store.put_local(owner, init) == FindOrPut::kInserted) {
      ++seed_tally.states;
      seeds[owner].push(init);
    }
  }
  TerminationDetector term(workers);

  auto run = [&](std::size_t self) {
    Frontier frontier = std::move(seeds[self]);
    Tally& tally = results[self].tally;
    std::vector<std::vector<StateWord>> outbox(workers);
    std::vector<StateWord> fresh;
    std::vector<StateWord> successors;
    StateVector current;
    IdleBackoff backoff;

    auto absorb = [&]() -> std::size_t {
      fresh.clear();
      const auto r = store.drain(self, fresh);
      if (r.table_full) throw TableFullError("partition table full; increase --table-bits");
      tally.states += r.fresh;
      for (std::size_t off = 0; off < fresh.size(); off += len) {
        frontier.push(StateView(fresh.data() + off, len));
      }
      return r.batches;
    };
    // Only called while busy, so absorbed batches are retired immediately.
    auto flush = [&](std::size_t dest) {
      auto& box = outbox[dest];
      if (box.empty()) return;
      term.add_pending(1);
      while (store.submit_batch(dest, box) == PartitionedStore::Submit::kFull) {
        if (const std::size_t b = absorb()) term.retire_pending(static_cast<std::int64_t>(b));
        if (abort.raised()) return;
        std::this_thread::yield();
      }
      box.clear();
    };
    auto flush_all = [&] {
      for (std::size_t d = 0; d < workers; ++d) flush(d);
    };

    try {
      bool busy = true;
      while (!abort.raised()) {
        if (busy) {
          if (const std::size_t b = absorb()) term.retire_pending(static_cast<std::int64_t>(b));
          if (frontier.empty()) {
            flush_all();
            term.worker_idle();
            busy = false;
            backoff.reset();
            continue;
          }
          for (std::size_t i = 0; i < config.budget && frontier.pop(config.order, current); ++i) {
            successors.clear();
            const std::size_t n = model.next_states(current, successors);
            tally.transitions += n;
            if (n == 0) tally.note_deadlock(current);
            for (std::size_t k = 0; k < n; ++k) {
              const StateView succ(successors.data() + k * len, len);
              const std::size_t owner = owner_of(succ, workers);
              if (owner == self) {
                const FindOrPut r = store.put_local(self, succ);
                if (r == FindOrPut::kInserted) {
                  ++tally.states;
                  frontier.push(succ);
                } else if (r == FindOrPut::kTableFull) {
                  throw TableFullError("partition table full; increase --table-bits");
                }
              } else {
                auto& box = outbox[owner];
                box.insert(box.end(), succ.begin(), succ.end());
                if (box.size() >= kBatchStates * len) flush(owner);
              }
            }
          }
          flush_all();
        } else {
          if (const std::size_t b = absorb()) {
            // One absorbed batch becomes this worker's busy token.
            busy = true;
            term.retire_pending(static_cast<std::int64_t>(b) - 1);
            continue;
          }
          if (term.terminated()) break;
          backoff.wait();
        }
      }
    } catch (const std::exception& e) {
      abort.raise(e.what());
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  const double wall = ms_since(start);

  std::vector<StorageStats> per_worker;
  per_worker.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) per_worker.push_back(snapshot_stats(store.counters(w)));
  ExploreReport report = assemble(model, StorageKind::kPartitioned, config, std::move(seed_tally),
                                  results, std::move(per_worker), wall);
  if (abort.raised()) throw ExploreError(abort.message(), std::move(report));
  return report;
}

unsigned partitioned_private_bits(unsigned table_bits, std::size_t workers) {
  const unsigned log_workers = static_cast<unsigned>(std::bit_width(workers - 1));
  const unsigned bits = table_bits + 1 > log_workers ? table_bits + 1 - log_workers : 0;
  return std::clamp(bits, StateTable::kMinBits, std::max(table_bits, StateTable::kMinBits));
}

ExploreReport explore(const Model& model, StorageKind kind, const ExploreConfig& config) {
  const std::size_t len = model.vector_len();
  switch (kind) {
    case StorageKind::kLockless: {
      StateTable table(config.table_bits, len);
      return explore(model, table, config);
    }
    case StorageKind::kRegion: {
      RegionLockedTable table(config.table_bits, len);
      return explore(model, table, config);
    }
    case StorageKind::kPartitioned: {
      PartitionedStore store(config.workers, len,
                             partitioned_private_bits(config.table_bits, config.workers));
      return explore_partitioned(model, store, config);
    }
  }
  throw std::invalid_argument("unknown storage kind");
}

}  // namespace lreach
