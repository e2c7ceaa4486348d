#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lreach/reachability.hpp"

namespace lreach {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One measured cell. Serialized as one CSV row; jsonl adds status and the
/// raw per-repetition wall times.
struct RunRecord {
  std::string experiment;
  std::string storage;
  std::size_t workers = 1;
  std::string model;
  double fill = 0.0;
  double throughput = 0.0;  // find-or-put calls per second
  double wall_ms = 0.0;     // minimum over repetitions
  double speedup = kNaN;
  double efficiency = kNaN;
  std::uint64_t lock_waits = 0;
  std::uint64_t cas_failures = 0;
  double probes_per_op = 0.0;

  std::string status = "ok";
  std::vector<double> raw_wall_ms;
};

/// S = T_seq / T_par.
double speedup(double t_seq, double t_par) noexcept;
/// E = S / N; E > 1 is super-linear.
double efficiency(double speedup, std::size_t workers) noexcept;

struct BenchConfig {
  unsigned table_bits = 22;
  std::vector<std::size_t> workers{1};
  std::vector<double> fills{0.5, 0.9, 0.99};
  unsigned rw_ratio = 3;  // reads per insert in the measured stream
  std::size_t vector_len = 4;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  /// Inserts in the measured stream, as a fraction of the table size.
  double window = 0.005;
  unsigned line_slots = kDefaultLineSlots;
  StorageKind storage = StorageKind::kLockless;
};

/// Deterministic distinct vector for id `id`.
void make_bench_vector(std::uint64_t id, std::uint64_t seed, std::span<StateWord> out) noexcept;

/// For each fill target and worker count: pre-fill a fresh table to the
/// target, then time a stream of rw_ratio reads per insert.
std::vector<RunRecord> bench_fill(const BenchConfig& config);

struct SpeedupConfig {
  std::string model = "hanoi:10";
  std::vector<StorageKind> storages{StorageKind::kLockless};
  std::vector<std::size_t> workers{1, 2, 4};
  std::size_t reps = 3;
  unsigned table_bits = 22;
  SearchOrder order = SearchOrder::kBfs;
  BalanceStrategy lb = BalanceStrategy::kSrp;
  std::uint64_t seed = 1;
};

/// explore() per (storage, workers) cell, reps times; keeps the minimum wall
/// time and derives S and E against the 1-worker run of the same storage.
std::vector<RunRecord> bench_speedup(const SpeedupConfig& config);

struct ProbeBounds {
  double successful = 0.0;    // (1/a) ln(1/(1-a)) + 1/a
  double unsuccessful = 0.0;  // 1/(1-a)
};

/// Open-addressing probe bounds at fill fraction alpha in (0, 1). alpha is
/// evaluated as the shortest decimal that round-trips to it, so 0.9 yields
/// an unsuccessful bound of exactly 10. Throws std::invalid_argument
/// outside (0, 1).
ProbeBounds probe_bounds(double alpha);

struct ProbeMeasurement {
  double alpha = 0.0;
  double unsuccessful = 0.0;  // mean probes per lookup of an absent vector
  double successful = 0.0;    // mean probes per lookup of a present vector
  ProbeBounds bounds;
};

/// Fills a table of 2^bits slots to alpha and averages probe counts over
/// `samples` lookups of absent and present vectors. line_slots = 1 disables
/// walking the line (pure double hashing).
ProbeMeasurement measure_probes(unsigned bits, unsigned line_slots, double alpha,
                                std::size_t samples, std::uint64_t seed);

enum class ReportFormat { kCsv, kJsonl };

inline constexpr std::string_view kCsvHeader =
    "experiment,storage,workers,model,fill,throughput,wall_ms,speedup,efficiency,lock_waits,"
    "cas_failures,probes_per_op";

ReportFormat parse_report_format(std::string_view name);

void write_csv(std::span<const RunRecord> records, std::ostream& out);
void write_jsonl(std::span<const RunRecord> records, std::ostream& out);
/// Parses what write_csv produced. Throws std::runtime_error on a bad header
/// or row.
std::vector<RunRecord> read_csv(std::istream& in);

/// Writes `records` to `path` ("-" for stdout). Throws std::invalid_argument
/// for an empty record list, std::runtime_error on I/O failure.
void report(std::span<const RunRecord> records, ReportFormat format, const std::string& path);

}  // namespace lreach
