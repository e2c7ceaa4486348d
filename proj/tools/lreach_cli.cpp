// lreach: reachability runs, storage benchmarks, probe bounds and the
// bucket protocol checker.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lreach/bench.hpp"
#include "lreach/protocol_check.hpp"
#include "lreach/reachability.hpp"

namespace {

using namespace lreach;

void print_report(const ExploreReport& r) {
  std::printf("model=%s storage=%s workers=%zu order=%s lb=%s\n", r.model.c_str(),
              std::string(to_string(r.storage)).c_str(), r.workers,
              std::string(to_string(r.order)).c_str(), std::string(to_string(r.lb)).c_str());
  std::printf("states=%llu transitions=%llu deadlocks=%llu wall_ms=%.3f\n",
              static_cast<unsigned long long>(r.states),
              static_cast<unsigned long long>(r.transitions),
              static_cast<unsigned long long>(r.deadlocks), r.wall_ms);
  std::printf("fop_calls=%llu inserts=%llu cas_failures=%llu lock_waits=%llu max_probe=%llu\n",
              static_cast<unsigned long long>(r.totals.fop_calls),
              static_cast<unsigned long long>(r.totals.inserts),
              static_cast<unsigned long long>(r.totals.cas_failures),
              static_cast<unsigned long long>(r.totals.lock_waits),
              static_cast<unsigned long long>(r.totals.max_probe));
  if (r.workers > 1) {
    std::printf("polls=%llu handoffs=%llu denials=%llu states_given=%llu\n",
                static_cast<unsigned long long>(r.balance.polls),
                static_cast<unsigned long long>(r.balance.handoffs),
                static_cast<unsigned long long>(r.balance.denials),
                static_cast<unsigned long long>(r.balance.states_given));
  }
  for (const auto& s : r.deadlock_samples) {
    std::printf("deadlock:");
    for (auto w : s) std::printf(" %u", w);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lockless find-or-put storage for parallel reachability"};
  app.require_subcommand(1);

  // reach
  auto* reach = app.add_subcommand("reach", "Explore a model and print counts");
  std::string model = "hanoi:6";
  std::string storage = "lockless";
  std::vector<std::size_t> threads{1};
  std::string order = "bfs";
  std::string lb = "srp";
  unsigned table_bits = 20;
  std::uint64_t seed = 1;
  bool verify = false;
  reach->add_option("--model", model, "hanoi:N | phils:N | diamond:W,D | helix:W,D | ets:PATH")
      ->capture_default_str();
  reach->add_option("--storage", storage, "lockless | region | partitioned")->capture_default_str();
  reach->add_option("--threads", threads, "worker counts")->delimiter(',')->capture_default_str();
  reach->add_option("--order", order, "bfs | dfs")->capture_default_str();
  reach->add_option("--lb", lb, "static | srp")->capture_default_str();
  reach->add_option("--table-bits", table_bits, "log2 of table slots")->capture_default_str();
  reach->add_option("--seed", seed, "rng seed for polling")->capture_default_str();
  reach->add_flag("--verify", verify, "compare counts against a sequential oracle");

  // bench fill / bench speedup
  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);
  std::string out = "-";
  std::string format = "csv";
  std::size_t reps = 1;

  auto* fill = bench->add_subcommand("fill", "Throughput against table fill rate");
  BenchConfig fc;
  std::string fill_storage = "lockless";
  fill->add_option("--table-bits", fc.table_bits)->capture_default_str();
  fill->add_option("--threads", fc.workers)->delimiter(',')->capture_default_str();
  fill->add_option("--fill", fc.fills, "fill targets in [0,1)")
      ->delimiter(',')
      ->capture_default_str();
  fill->add_option("--rw-ratio", fc.rw_ratio, "reads per insert")->capture_default_str();
  fill->add_option("--storage", fill_storage, "lockless | region")->capture_default_str();
  fill->add_option("--reps", reps)->capture_default_str();
  fill->add_option("--seed", fc.seed)->capture_default_str();
  fill->add_option("--out", out)->capture_default_str();
  fill->add_option("--format", format, "csv | jsonl")->capture_default_str();

  auto* speed = bench->add_subcommand("speedup", "Speedup and efficiency per storage");
  SpeedupConfig sc;
  std::vector<std::string> storages{"lockless"};
  std::string sp_order = "bfs";
  std::string sp_lb = "srp";
  std::size_t sp_reps = sc.reps;
  speed->add_option("--model", sc.model)->capture_default_str();
  speed->add_option("--storage", storages)->delimiter(',')->capture_default_str();
  speed->add_option("--threads", sc.workers)->delimiter(',')->capture_default_str();
  speed->add_option("--order", sp_order)->capture_default_str();
  speed->add_option("--lb", sp_lb)->capture_default_str();
  speed->add_option("--table-bits", sc.table_bits)->capture_default_str();
  speed->add_option("--reps", sp_reps)->capture_default_str();
  speed->add_option("--seed", sc.seed)->capture_default_str();
  speed->add_option("--out", out)->capture_default_str();
  speed->add_option("--format", format)->capture_default_str();

  // probe-bounds
  auto* probes = app.add_subcommand("probe-bounds", "Analytic (and measured) probe counts");
  std::vector<double> alphas{0.5, 0.9};
  bool measure = false;
  unsigned probe_bits = 20;
  unsigned line_slots = 1;
  std::size_t samples = 100000;
  probes->add_option("--fill", alphas, "fill fractions in (0,1)")
      ->delimiter(',')
      ->capture_default_str();
  probes->add_flag("--measure", measure, "also measure on a real table");
  probes->add_option("--table-bits", probe_bits)->capture_default_str();
  probes->add_option("--line-slots", line_slots, "1 disables walking the line")
      ->capture_default_str();
  probes->add_option("--samples", samples)->capture_default_str();
  probes->add_option("--seed", seed)->capture_default_str();

  // check-protocol
  auto* check = app.add_subcommand("check-protocol", "Exhaustive bucket protocol check");
  std::vector<std::string> variants{"correct", "data-after-done", "missing-write-bit"};
  std::size_t check_threads = 2;
  std::size_t check_slots = 2;
  check->add_option("--variant", variants)->delimiter(',')->capture_default_str();
  check->add_option("--threads", check_threads)->capture_default_str();
  check->add_option("--slots", check_slots)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*reach) {
      const auto m = make_model(model);
      const StorageKind kind = parse_storage_kind(storage);
      ExploreConfig cfg;
      cfg.order = parse_search_order(order);
      cfg.lb = parse_balance(lb);
      cfg.seed = seed;
      cfg.table_bits = table_bits;
      OracleResult oracle;
      if (verify) oracle = oracle_reach(*m);
      int rc = 0;
      for (std::size_t k : threads) {
        cfg.workers = k;
        try {
          const ExploreReport r = explore(*m, kind, cfg);
          print_report(r);
          if (verify) {
            const bool same = r.states == oracle.states && r.transitions == oracle.transitions &&
                              r.deadlocks == oracle.deadlocks;
            std::printf("verify: %s (oracle states=%llu transitions=%llu deadlocks=%llu)\n",
                        same ? "match" : "MISMATCH",
                        static_cast<unsigned long long>(oracle.states),
                        static_cast<unsigned long long>(oracle.transitions),
                        static_cast<unsigned long long>(oracle.deadlocks));
            if (!same) rc = 1;
          }
        } catch (const ExploreError& e) {
          std::fprintf(stderr, "error: %s\n", e.what());
          print_report(e.partial());
          rc = 2;
        }
      }
      return rc;
    }

    if (*fill) {
      fc.reps = reps;
      fc.storage = parse_storage_kind(fill_storage);
      const auto records = bench_fill(fc);
      report(records, parse_report_format(format), out);
      return 0;
    }

    if (*speed) {
      sc.storages.clear();
      for (const auto& s : storages) sc.storages.push_back(parse_storage_kind(s));
      sc.order = parse_search_order(sp_order);
      sc.lb = parse_balance(sp_lb);
      sc.reps = sp_reps;
      const auto records = bench_speedup(sc);
      report(records, parse_report_format(format), out);
      return 0;
    }

    if (*probes) {
      for (double a : alphas) {
        const ProbeBounds b = probe_bounds(a);
        if (!measure) {
          std::printf("alpha=%g successful=%.6f unsuccessful=%.6f\n", a, b.successful,
                      b.unsuccessful);
          continue;
        }
        const ProbeMeasurement pm = measure_probes(probe_bits, line_slots, a, samples, seed);
        std::printf(
            "alpha=%g successful=%.6f (measured %.4f) unsuccessful=%.6f (measured %.4f)\n", a,
            b.successful, pm.successful, b.unsuccessful, pm.unsuccessful);
      }
      return 0;
    }

    if (*check) {
      int rc = 0;
      for (const auto& name : variants) {
        const ProtocolVariant v = parse_protocol_variant(name);
        const CheckResult r = check_bucket_protocol(v, check_threads, check_slots);
        if (r.ok) {
          std::printf("%s: ok (%zu states)\n", name.c_str(), r.states_explored);
          continue;
        }
        std::printf("%s: violation of %s in scenario %s (%zu states)\n", name.c_str(),
                    r.property.c_str(), std::string(to_string(r.scenario)).c_str(),
                    r.states_explored);
        for (const auto& line : r.trace) std::printf("  %s\n", line.c_str());
        if (v == ProtocolVariant::kCorrect) rc = 1;
      }
      return rc;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
