#include "lreach/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <latch>
#include <random>
#include <stdexcept>
#include <thread>

namespace lreach {

double speedup(double t_seq, double t_par) noexcept { return t_seq / t_par; }

double efficiency(double speedup, std::size_t workers) noexcept {
  return speedup / static_cast<double>(workers);
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void make_bench_vector(std::uint64_t id, std::uint64_t seed, std::span<StateWord> out) noexcept {
  // The id occupies the first two words, which keeps vectors distinct.
  out[0] = static_cast<StateWord>(id);
  if (out.size() > 1) out[1] = static_cast<StateWord>(id >> 32);
  std::uint64_t x = id ^ (seed * 0xd6e8feb86659fd93ULL);
  for (std::size_t k = 2; k < out.size(); ++k) {
    x = splitmix(x);
    out[k] = static_cast<StateWord>(x);
  }
}

namespace {

struct FillOutcome {
  bool table_full = false;
  bool membership_ok = true;
  double wall_ms = 0.0;
  std::uint64_t ops = 0;
  StorageStats stats;
};

// Runs `body(worker)` on `workers` threads released together; returns the
// wall time between release and the last join.
template <class Body>
double timed_parallel(std::size_t workers, Body body) {
  std::latch ready(static_cast<std::ptrdiff_t>(workers) + 1);
  std::latch go(1);
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      ready.count_down();
      go.wait();
      body(w);
    });
  }
  ready.arrive_and_wait();
  const auto start = Clock::now();
  go.count_down();
  threads.clear();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <SharedStorage Table>
FillOutcome run_fill_point(Table& table, const BenchConfig& config, double fill,
                           std::size_t workers, std::uint64_t rep_seed) {
  const std::size_t len = config.vector_len;
  const std::size_t size = table.capacity();
  const auto prefill = static_cast<std::uint64_t>(std::floor(fill * static_cast<double>(size)));
  FillOutcome outcome;
  std::atomic<bool> full{false};
  std::atomic<bool> mismatch{false};

  {
    std::vector<StorageCounters> scratch(workers);
    timed_parallel(workers, [&](std::size_t w) {
      StateVector v(len);
      for (std::uint64_t id = w; id < prefill && !full.load(std::memory_order_relaxed);
           id += workers) {
        make_bench_vector(id, rep_seed, v);
        const FindOrPut r = table.find_or_put(v, scratch[w]);
        if (r == FindOrPut::kTableFull) full.store(true);
        if (r == FindOrPut::kFound) mismatch.store(true);
      }
    });
  }
  if (full.load()) {
    outcome.table_full = true;
    return outcome;
  }

  const auto inserts =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(config.window * static_cast<double>(size)));
  const std::uint64_t reads_per = config.rw_ratio;
  std::vector<StorageCounters> counters(workers);

  outcome.wall_ms = timed_parallel(workers, [&](std::size_t w) {
    std::mt19937_64 rng(rep_seed * 7919 + w);
    StateVector v(len);
    std::uint64_t own = 0;
    for (std::uint64_t k = w; k < inserts; k += workers) {
      const std::uint64_t id = prefill + k;
      make_bench_vector(id, rep_seed, v);
      const FindOrPut r = table.find_or_put(v, counters[w]);
      if (r == FindOrPut::kTableFull) {
        full.store(true);
        return;
      }
      if (r != FindOrPut::kInserted) mismatch.store(true);
      ++own;
      for (std::uint64_t j = 0; j < reads_per; ++j) {
        // Uniform over the prefilled ids and the ones this worker inserted.
        const std::uint64_t pick = rng() % (prefill + own);
        const std::uint64_t rid = pick < prefill ? pick : prefill + w + workers * (pick - prefill);
        make_bench_vector(rid, rep_seed, v);
        if (table.find_or_put(v, counters[w]) != FindOrPut::kFound) mismatch.store(true);
      }
    }
  });

  outcome.table_full = full.load();
  outcome.membership_ok = !mismatch.load();
  outcome.stats = snapshot_stats(std::span<const StorageCounters>(counters));
  outcome.ops = outcome.stats.fop_calls;
  return outcome;
}

FillOutcome fill_point(const BenchConfig& config, double fill, std::size_t workers,
                       std::uint64_t rep_seed) {
  if (config.storage == StorageKind::kRegion) {
    RegionLockedTable table(config.table_bits, config.vector_len, config.line_slots);
    return run_fill_point(table, config, fill, workers, rep_seed);
  }
  if (config.storage != StorageKind::kLockless) {
    throw std::invalid_argument("fill benchmark needs a shared table (lockless or region)");
  }
  StateTable table(config.table_bits, config.vector_len, config.line_slots);
  return run_fill_point(table, config, fill, workers, rep_seed);
}

std::string fill_workload(const BenchConfig& config) {
  return "random:len=" + std::to_string(config.vector_len) +
         ";r=" + std::to_string(config.rw_ratio) + ";bits=" + std::to_string(config.table_bits);
}

}  // namespace

std::vector<RunRecord> bench_fill(const BenchConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("reps must be >= 1");
  if (config.vector_len == 0) throw std::invalid_argument("vector_len must be >= 1");
  for (double f : config.fills) {
    if (!(f >= 0.0 && f < 1.0)) throw std::invalid_argument("fill targets must lie in [0, 1)");
  }
  std::vector<RunRecord> records;
  for (double fill : config.fills) {
    const std::size_t first = records.size();
    for (std::size_t workers : config.workers) {
      if (workers == 0) throw std::invalid_argument("workers must be >= 1");
      RunRecord rec;
      rec.experiment = "fill";
      rec.storage = std::string(to_string(config.storage));
      rec.workers = workers;
      rec.model = fill_workload(config);
      rec.fill = fill;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t rep = 0; rep < config.reps; ++rep) {
        const FillOutcome out = fill_point(config, fill, workers, config.seed + rep);
        if (out.table_full) {
          rec.status = "table_full";
          break;
        }
        if (!out.membership_ok) rec.status = "membership_error";
        rec.raw_wall_ms.push_back(out.wall_ms);
        if (out.wall_ms < best) {
          best = out.wall_ms;
          rec.wall_ms = out.wall_ms;
          rec.throughput = static_cast<double>(out.ops) / (out.wall_ms / 1000.0);
          rec.lock_waits = out.stats.lock_waits;
          rec.cas_failures = out.stats.cas_failures;
          rec.probes_per_op = out.stats.fop_calls == 0
                                  ? 0.0
                                  : static_cast<double>(out.stats.probes_total) /
                                        static_cast<double>(out.stats.fop_calls);
        }
      }
      if (rec.status == "table_full") rec.throughput = kNaN;
      records.push_back(std::move(rec));
    }
    // Speedup against the single-worker point at the same fill, when present.
    const auto base = std::find_if(records.begin() + static_cast<std::ptrdiff_t>(first),
                                   records.end(), [](const RunRecord& r) { return r.workers == 1; });
    if (base != records.end() && base->status == "ok") {
      const double base_wall = base->wall_ms;
      for (auto it = records.begin() + static_cast<std::ptrdiff_t>(first); it != records.end();
           ++it) {
        if (it->status != "ok") continue;
        it->speedup = speedup(base_wall, it->wall_ms);
        it->efficiency = efficiency(it->speedup, it->workers);
      }
    }
  }
  return records;
}

std::vector<RunRecord> bench_speedup(const SpeedupConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("reps must be >= 1");
  const auto model = make_model(config.model);
  std::vector<RunRecord> records;

  for (StorageKind kind : config.storages) {
    std::vector<std::size_t> cells = config.workers;
    const bool has_baseline = std::find(cells.begin(), cells.end(), 1) != cells.end();
    if (!has_baseline) cells.insert(cells.begin(), 1);

    double base_wall = kNaN;
    for (std::size_t workers : cells) {
      RunRecord rec;
      rec.experiment = "speedup";
      rec.storage = std::string(to_string(kind));
      rec.workers = workers;
      rec.model = model->name();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t rep = 0; rep < config.reps; ++rep) {
        ExploreConfig ec;
        ec.workers = workers;
        ec.order = config.order;
        ec.lb = config.lb;
        ec.seed = config.seed + rep;
        ec.table_bits = config.table_bits;
        try {
          const ExploreReport r = explore(*model, kind, ec);
          rec.raw_wall_ms.push_back(r.wall_ms);
          if (r.wall_ms < best) {
            best = r.wall_ms;
            rec.wall_ms = r.wall_ms;
            rec.fill = static_cast<double>(r.states) /
                       static_cast<double>(std::size_t{1} << config.table_bits);
            rec.throughput = static_cast<double>(r.totals.fop_calls) / (r.wall_ms / 1000.0);
            rec.lock_waits = r.totals.lock_waits;
            rec.cas_failures = r.totals.cas_failures;
            rec.probes_per_op = r.totals.fop_calls == 0
                                    ? 0.0
                                    : static_cast<double>(r.totals.probes_total) /
                                          static_cast<double>(r.totals.fop_calls);
          }
        } catch (const ExploreError& e) {
          rec.status = "error: " + std::string(e.what());
          break;
        }
      }
      if (workers == 1 && rec.status == "ok") base_wall = rec.wall_ms;
      if (rec.status == "ok" && !std::isnan(base_wall)) {
        rec.speedup = speedup(base_wall, rec.wall_ms);
        rec.efficiency = efficiency(rec.speedup, workers);
      }
      if (workers == 1 && !has_baseline) continue;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

ProbeBounds probe_bounds(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  // Shortest decimal that round-trips, e.g. "0.9", read as digits / 10^scale.
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), alpha,
                                 std::chars_format::fixed);
  const std::string_view text(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
  const auto dot = text.find('.');
  const std::string_view frac = dot == std::string_view::npos ? "" : text.substr(dot + 1);

  ProbeBounds b;
  if (res.ec == std::errc{} && !frac.empty() && frac.size() <= 18) {
    std::uint64_t digits = 0;
    std::uint64_t scale = 1;
    for (char c : frac) {
      digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
      scale *= 10;
    }
    const double inv_a = static_cast<double>(scale) / static_cast<double>(digits);
    b.unsuccessful = static_cast<double>(scale) / static_cast<double>(scale - digits);
    b.successful = inv_a * std::log(b.unsuccessful) + inv_a;
  } else {
    b.unsuccessful = 1.0 / (1.0 - alpha);
    b.successful = std::log(b.unsuccessful) / alpha + 1.0 / alpha;
  }
  return b;
}

ProbeMeasurement measure_probes(unsigned bits, unsigned line_slots, double alpha,
                                std::size_t samples, std::uint64_t seed) {
  constexpr std::size_t kLen = 4;
  StateTable table(bits, kLen, line_slots);
  StorageCounters fill_counters;
  const auto count =
      static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(table.capacity())));
  StateVector v(kLen);
  for (std::uint64_t id = 0; id < count; ++id) {
    make_bench_vector(id, seed, v);
    if (table.find_or_put(v, fill_counters) != FindOrPut::kInserted) {
      throw std::runtime_error("measure_probes: prefill failed at id " + std::to_string(id));
    }
  }

  ProbeMeasurement m;
  m.alpha = static_cast<double>(count) / static_cast<double>(table.capacity());
  m.bounds = probe_bounds(alpha);

  StorageCounters absent;
  for (std::uint64_t i = 0; i < samples; ++i) {
    make_bench_vector(count + i, seed, v);
    if (table.contains(v, &absent)) throw std::runtime_error("measure_probes: phantom member");
  }
  m.unsuccessful = static_cast<double>(absent.probes_total.get()) / static_cast<double>(samples);

  StorageCounters present;
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < samples && count > 0; ++i) {
    make_bench_vector(rng() % count, seed, v);
    if (!table.contains(v, &present)) throw std::runtime_error("measure_probes: lost member");
  }
  m.successful = static_cast<double>(present.probes_total.get()) / static_cast<double>(samples);
  return m;
}

}  // namespace lreach
