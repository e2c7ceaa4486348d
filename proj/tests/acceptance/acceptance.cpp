// Acceptance run: one PASS / FAIL / SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <new>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "lreach/bench.hpp"
#include "lreach/protocol_check.hpp"
#include "lreach/reachability.hpp"

// Counting allocator hook for the allocation-freeze criterion.
namespace {
std::atomic<std::uint64_t> g_allocations{0};
}

void* operator new(std::size_t n) {
  g_allocations.fetch_add(1, std::memory_order_relaxed);
  if (void* p = std::malloc(n == 0 ? 1 : n)) return p;
  throw std::bad_alloc();
}
void* operator new[](std::size_t n) { return operator new(n); }
void* operator new(std::size_t n, std::align_val_t a) {
  g_allocations.fetch_add(1, std::memory_order_relaxed);
  const std::size_t align = static_cast<std::size_t>(a);
  if (void* p = std::aligned_alloc(align, (n + align - 1) / align * align)) return p;
  throw std::bad_alloc();
}
void* operator new[](std::size_t n, std::align_val_t a) { return operator new(n, a); }
void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }
void operator delete(void* p, std::align_val_t) noexcept { std::free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { std::free(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }

namespace {

using namespace lreach;
using Clock = std::chrono::steady_clock;

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

int g_failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {Verdict::kFail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (out.verdict != Verdict::kSkip && secs > limit_s) {
    out.verdict = Verdict::kFail;
    out.detail += "; exceeded time limit";
  }
  const char* tag = out.verdict == Verdict::kPass ? "PASS" : out.verdict == Verdict::kFail ? "FAIL" : "SKIP";
  if (out.verdict == Verdict::kFail) ++g_failures;
  std::printf("%s %d %s: %s (%.1f s, limit %.0f s)\n", tag, id, title, out.detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

StateVector vec_of(std::uint64_t id, std::size_t len = 4) {
  StateVector v(len, 0);
  make_bench_vector(id, 7, v);
  return v;
}

// 1 ------------------------------------------------------------------------
Outcome exactness() {
  std::vector<std::string> specs;
  for (int n = 1; n <= 6; ++n) specs.push_back("hanoi:" + std::to_string(n));
  for (int n = 2; n <= 5; ++n) specs.push_back("phils:" + std::to_string(n));
  specs.push_back("diamond:8,8");
  specs.push_back("helix:4,1000");
  for (const char* f : {"chain5.ets", "loops.ets", "cube.ets"}) {
    specs.push_back(std::string("ets:") + LREACH_FIXTURES + "/" + f);
  }

  std::size_t runs = 0, bad = 0;
  std::string first_bad;
  for (const auto& spec : specs) {
    const auto model = make_model(spec);
    const auto oracle = oracle_reach(*model);
    for (auto kind : {StorageKind::kLockless, StorageKind::kRegion, StorageKind::kPartitioned}) {
      for (std::size_t workers : {1, 2, 4, 8}) {
        for (auto order : {SearchOrder::kBfs, SearchOrder::kDfs}) {
          for (auto lb : {BalanceStrategy::kStatic, BalanceStrategy::kSrp}) {
            ExploreConfig cfg;
            cfg.workers = workers;
            cfg.order = order;
            cfg.lb = lb;
            cfg.seed = runs + 1;
            cfg.table_bits = 14;
            const auto r = explore(*model, kind, cfg);
            ++runs;
            if (r.states != oracle.states || r.transitions != oracle.transitions ||
                r.deadlocks != oracle.deadlocks) {
              if (bad++ == 0) {
                first_bad = spec + " " + std::string(to_string(kind)) + " w=" +
                            std::to_string(workers) + " " + std::string(to_string(order)) + " " +
                            std::string(to_string(lb)) + ": " + std::to_string(r.states) + "/" +
                            std::to_string(r.transitions) + "/" + std::to_string(r.deadlocks);
              }
            }
          }
        }
      }
    }
  }
  if (bad != 0) {
    return {Verdict::kFail, std::to_string(bad) + " of " + std::to_string(runs) +
                                " runs differ from the oracle, first: " + first_bad};
  }
  return {Verdict::kPass, std::to_string(runs) + " runs (" + std::to_string(specs.size()) +
                              " models x 3 storages x 4 worker counts x 2 orders x 2 balancers) "
                              "match the oracle"};
}

// 2 ------------------------------------------------------------------------
Outcome set_semantics() {
  const std::size_t workers = 8;
  const std::uint64_t distinct = 700000, total = 1000000;
  std::vector<std::uint64_t> stream(total);
  for (std::uint64_t i = 0; i < distinct; ++i) stream[i] = i;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint64_t> pick(0, distinct - 1);
  for (std::uint64_t i = distinct; i < total; ++i) stream[i] = pick(rng);
  std::shuffle(stream.begin(), stream.end(), rng);

  std::vector<StateWord> flat(total * 4);
  for (std::uint64_t i = 0; i < total; ++i) {
    make_bench_vector(stream[i], 7, std::span<StateWord>(flat.data() + i * 4, 4));
  }
  const std::unordered_set<std::uint64_t> oracle(stream.begin(), stream.end());

  StateTable table(21, 4);
  std::vector<StorageCounters> counters(workers);
  std::atomic<std::uint64_t> inserted{0}, full{0};
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        std::uint64_t ins = 0, tf = 0;
        for (std::uint64_t i = w; i < total; i += workers) {
          const auto r = table.find_or_put(StateView(flat.data() + i * 4, 4), counters[w]);
          ins += r == FindOrPut::kInserted;
          tf += r == FindOrPut::kTableFull;
        }
        inserted.fetch_add(ins);
        full.fetch_add(tf);
      });
    }
  }

  std::uint64_t missing = 0;
  for (std::uint64_t id : oracle) missing += !table.contains(vec_of(id));
  // Every stored vector must come from the stream.
  std::uint64_t stored = 0, foreign = 0;
  for (std::size_t s = 0; s < table.capacity(); ++s) {
    if ((table.bucket_word(s) & StateTable::kDoneBit) == 0) continue;
    ++stored;
    const auto d = table.data_at(s);
    const std::uint64_t id = (std::uint64_t{d[1]} << 32) | d[0];
    foreign += !oracle.contains(id) || StateVector(d.begin(), d.end()) != vec_of(id);
  }
  std::ostringstream msg;
  msg << "distinct=" << oracle.size() << " inserted=" << inserted.load() << " stored=" << stored
      << " missing=" << missing << " foreign=" << foreign << " table_full=" << full.load();
  const bool ok = inserted.load() == oracle.size() && stored == oracle.size() && missing == 0 &&
                  foreign == 0 && full.load() == 0 && oracle.size() == distinct;
  return {ok ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 3 ------------------------------------------------------------------------
Outcome protocol() {
  const auto good = check_bucket_protocol(ProtocolVariant::kCorrect);
  const auto dad = check_bucket_protocol(ProtocolVariant::kDataAfterDone);
  const auto mwb = check_bucket_protocol(ProtocolVariant::kMissingWriteBit);
  std::ostringstream msg;
  msg << "correct: " << (good.ok ? "ok" : "violation " + good.property) << " ("
      << good.states_explored << " states); data-after-done: "
      << (dad.ok ? "not caught" : "caught " + dad.property) << "; missing-write-bit: "
      << (mwb.ok ? "not caught" : "caught " + mwb.property);
  return {good.ok && !dad.ok && !mwb.ok ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 4 ------------------------------------------------------------------------
Outcome fill_rate() {
  BenchConfig cfg;
  cfg.table_bits = 22;
  cfg.workers = {1, 4};
  cfg.fills = {0.5, 0.9, 0.99};
  cfg.reps = 5;  // minimum of five; single short windows are noisy
  const auto recs = bench_fill(cfg);
  auto find = [&](std::size_t w, double f) -> const RunRecord& {
    return *std::find_if(recs.begin(), recs.end(),
                         [&](const RunRecord& r) { return r.workers == w && r.fill == f; });
  };
  bool ok = true;
  std::ostringstream msg;
  for (std::size_t w : cfg.workers) {
    const auto& a = find(w, 0.5);
    const auto& b = find(w, 0.9);
    const auto& c = find(w, 0.99);
    const double ratio = b.throughput / a.throughput;
    ok = ok && a.status == "ok" && b.status == "ok" && c.status == "ok" && ratio >= 0.5;
    msg << "w=" << w << ": tput(0.9)/tput(0.5)=" << fmt("%.3f", ratio)
        << " 0.99=" << c.status << " (" << fmt("%.3g", c.throughput) << " ops/s); ";
  }
  return {ok ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 5 ------------------------------------------------------------------------
Outcome lock_waits() {
  const auto model = make_model("phils:16");
  ExploreConfig cfg;
  cfg.workers = 8;
  cfg.table_bits = 22;
  const auto r = explore(*model, StorageKind::kLockless, cfg);
  const double rate = static_cast<double>(r.totals.lock_waits) /
                      static_cast<double>(r.totals.fop_calls);
  std::ostringstream msg;
  msg << "phils:16 states=" << r.states << " fop_calls=" << r.totals.fop_calls
      << " lock_waits=" << r.totals.lock_waits << " rate=" << fmt("%.2e", rate);
  return {r.states >= 1000000 && rate < 1e-3 ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 6 ------------------------------------------------------------------------
Outcome scalability() {
  SpeedupConfig cfg;
  cfg.model = "phils:16";
  cfg.storages = {StorageKind::kLockless, StorageKind::kRegion};
  cfg.workers = {1, 2, 4, 8};
  cfg.table_bits = 22;
  const unsigned cores = std::thread::hardware_concurrency();
  cfg.reps = cores < 4 ? 1 : 3;
  const auto recs = bench_speedup(cfg);
  auto s_of = [&](const char* storage, std::size_t w) {
    for (const auto& r : recs) {
      if (r.storage == storage && r.workers == w) return r.speedup;
    }
    return kNaN;
  };
  std::ostringstream msg;
  msg << "lockless S(1,2,4,8)=" << fmt("%.2f", s_of("lockless", 1)) << ","
      << fmt("%.2f", s_of("lockless", 2)) << "," << fmt("%.2f", s_of("lockless", 4)) << ","
      << fmt("%.2f", s_of("lockless", 8)) << " region S(8)=" << fmt("%.2f", s_of("region", 8));
  msg << "; " << cores << " hardware threads";
  if (cores < 4) {
    msg << "; the floor applies to machines with at least 4 cores";
    return {Verdict::kSkip, msg.str()};
  }
  const bool ok = s_of("lockless", 4) >= 2.0 && s_of("lockless", 2) >= s_of("lockless", 1) &&
                  s_of("lockless", 4) >= s_of("lockless", 2);
  if (s_of("lockless", 8) < s_of("region", 8)) msg << "; warning: region beat lockless at 8";
  return {ok ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 7 ------------------------------------------------------------------------
Outcome probe_bounds_check() {
  bool ok = probe_bounds(0.9).unsuccessful == 10.0;
  std::ostringstream msg;
  msg << "probe_bounds(0.9).unsuccessful=" << fmt("%.17g", probe_bounds(0.9).unsuccessful);
  for (double a : {0.5, 0.9}) {
    const auto m = measure_probes(20, 1, a, 100000, 11);
    const double bound = m.bounds.unsuccessful;
    ok = ok && m.unsuccessful >= bound / 2 && m.unsuccessful <= bound * 2;
    msg << "; alpha=" << a << " unsuccessful " << fmt("%.3f", m.unsuccessful) << " vs "
        << fmt("%.3f", bound) << ", successful " << fmt("%.3f", m.successful) << " vs "
        << fmt("%.3f", m.bounds.successful);
  }
  return {ok ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 8 ------------------------------------------------------------------------
Outcome allocation_freeze() {
  const std::size_t n = 200000;
  std::vector<StateWord> flat(n * 4);
  for (std::size_t i = 0; i < n; ++i) {
    make_bench_vector(i, 3, std::span<StateWord>(flat.data() + i * 4, 4));
  }
  StateTable lockless(18, 4);
  RegionLockedTable region(18, 4);
  StateTable tiny(4, 4);
  std::vector<StorageCounters> counters(4);
  std::uint64_t calls = 0;

  const std::uint64_t before = g_allocations.load();
  for (std::size_t i = 0; i < n; ++i) {
    const StateView v(flat.data() + i * 4, 4);
    lockless.find_or_put(v, counters[0]);
    lockless.find_or_put(v, counters[0]);
    region.find_or_put(v, counters[1]);
    calls += 3;
  }
  for (std::size_t i = 0; i < 64; ++i) {  // includes TABLE_FULL returns
    tiny.find_or_put(StateView(flat.data() + i * 4, 4), counters[2]);
    ++calls;
  }
  const std::uint64_t single = g_allocations.load() - before;

  // Concurrent section: threads are created before counting starts.
  StateTable shared(18, 4);
  std::atomic<int> phase{0};
  std::atomic<std::uint64_t> during{0};
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < 4; ++w) {
      threads.emplace_back([&, w] {
        while (phase.load() == 0) std::this_thread::yield();
        for (std::size_t i = 0; i < n; ++i) {
          shared.find_or_put(StateView(flat.data() + ((i + w * 997) % n) * 4, 4), counters[w]);
        }
      });
    }
    const std::uint64_t start = g_allocations.load();
    phase.store(1);
    for (auto& t : threads) t.join();
    during.store(g_allocations.load() - start);
  }
  calls += 4 * n;
  std::ostringstream msg;
  msg << calls << " find_or_put calls, " << single + during.load() << " allocations";
  return {single == 0 && during.load() == 0 ? Verdict::kPass : Verdict::kFail, msg.str()};
}

// 9 ------------------------------------------------------------------------
Outcome invariants() {
  std::vector<std::string> failures;

  // Bucket monotonicity: empty -> memo|write -> memo|done, memo fixed.
  {
    StateTable table(16, 4);
    std::vector<StorageCounters> counters(4);
    std::atomic<bool> stop{false};
    std::uint64_t violations = 0, samples = 0;
    std::thread sampler([&] {
      std::vector<std::uint64_t> last(table.capacity(), 0);
      std::mt19937_64 rng(5);
      while (!stop.load()) {
        const std::size_t s = rng() & table.geometry().mask();
        const std::uint64_t now = table.bucket_word(s);
        const std::uint64_t was = last[s];
        if (was != 0 && ((now >> 1) != (was >> 1) || (now & 1) < (was & 1))) ++violations;
        last[s] = now;
        ++samples;
      }
    });
    {
      std::vector<std::jthread> writers;
      for (std::size_t w = 0; w < 4; ++w) {
        writers.emplace_back([&, w] {
          StateVector v(4);
          for (std::uint64_t i = 0; i < 50000; ++i) {
            make_bench_vector(i * 4 + w, 9, v);
            table.find_or_put(v, counters[w]);
          }
        });
      }
    }
    stop.store(true);
    sampler.join();
    if (violations != 0 || samples == 0) {
      failures.push_back("bucket monotonicity: " + std::to_string(violations) + " violations in " +
                         std::to_string(samples) + " samples");
    }
  }

  // walk_the_line: starts at the index, stays in its line, visits each slot once.
  for (unsigned ls : {1u, 2u, 4u, 8u, 16u}) {
    const TableGeometry g(10, ls);
    for (std::size_t index = 0; index < g.size(); ++index) {
      const auto w = walk_the_line(index, g);
      std::set<std::size_t> seen;
      bool ok = w[0] == index && w.line_start() == index / ls * ls;
      for (unsigned i = 0; i < w.size(); ++i) {
        ok = ok && w[i] / ls == index / ls && w[i] < g.size();
        seen.insert(w[i]);
      }
      if (!ok || seen.size() != ls) {
        failures.push_back("walk_the_line(" + std::to_string(index) + ", " + std::to_string(ls) + ")");
        break;
      }
    }
  }

  // Split conservation on random frontiers.
  {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = rng() % 300;
      Frontier f(2);
      StateVector out;
      for (StateWord i = 0; i < n; ++i) {
        f.push(StateVector{i, i});
        if (rng() % 4 == 0) f.pop(SearchOrder::kBfs, out);
      }
      std::multiset<StateVector> before;
      for (auto& v : f.to_vectors()) before.insert(v);
      const std::size_t size = f.size();
      Frontier g = f.split();
      std::multiset<StateVector> after;
      for (auto& v : f.to_vectors()) after.insert(v);
      for (auto& v : g.to_vectors()) after.insert(v);
      if (after != before || g.size() != (size >= 2 ? size / 2 : 0)) {
        failures.push_back("split conservation at size " + std::to_string(size));
        break;
      }
    }
  }

  // Termination detection: no early stop over randomized helix runs.
  {
    const auto model = make_model("helix:4,1000");
    const auto oracle = oracle_reach(*model);
    std::mt19937_64 rng(99);
    int bad = 0;
    for (int run = 0; run < 100; ++run) {
      ExploreConfig cfg;
      cfg.workers = 8;
      cfg.lb = BalanceStrategy::kSrp;
      cfg.order = rng() % 2 ? SearchOrder::kBfs : SearchOrder::kDfs;
      cfg.seed = rng();
      cfg.budget = 1 + rng() % 128;
      cfg.table_bits = 12;
      const auto r = explore(*model, StorageKind::kLockless, cfg);
      bad += r.states != oracle.states || r.transitions != oracle.transitions ||
             r.deadlocks != oracle.deadlocks;
    }
    if (bad != 0) failures.push_back(std::to_string(bad) + " of 100 helix runs ended early");
  }

  if (!failures.empty()) {
    std::string msg;
    for (const auto& f : failures) msg += (msg.empty() ? "" : "; ") + f;
    return {Verdict::kFail, msg};
  }
  return {Verdict::kPass,
          "bucket monotonicity, walk_the_line, split conservation, 100 helix:4,1000 runs at 8 "
          "workers"};
}

}  // namespace

int main() {
  run(1, "exactness matrix", 600, exactness);
  run(2, "concurrent set semantics", 60, set_semantics);
  run(3, "bucket protocol", 60, protocol);
  run(4, "fill-rate robustness", 300, fill_rate);
  run(5, "lock-wait rarity", 120, lock_waits);
  run(6, "scalability floor", 300, scalability);
  run(7, "probe-bound consistency", 120, probe_bounds_check);
  run(8, "allocation freeze", 60, allocation_freeze);
  run(9, "invariant suite", 300, invariants);
  return g_failures == 0 ? 0 : 1;
}
