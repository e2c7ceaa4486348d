#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lreach {

/// Orderings of the bucket claim/publish protocol the checker can run.
enum class ProtocolVariant {
  kCorrect,           // CAS to WRITE, write data, store DONE
  kDataAfterDone,     // CAS to WRITE, store DONE, then write data
  kMissingWriteBit,   // CAS straight to DONE, then write data
};

enum class ProtocolScenario {
  kSameVector,      // every thread inserts the same vector
  kDistinctMemos,   // distinct vectors, distinct memos, same start slot
  kSameMemo,        // distinct vectors sharing one memo, same start slot
};

std::string_view to_string(ProtocolVariant v) noexcept;
std::string_view to_string(ProtocolScenario s) noexcept;
ProtocolVariant parse_protocol_variant(std::string_view name);

struct CheckResult {
  bool ok = true;
  std::string property;             // violated property, empty when ok
  ProtocolScenario scenario = ProtocolScenario::kSameVector;
  std::vector<std::string> trace;   // numbered steps leading to the violation
  std::size_t states_explored = 0;
};

/// Enumerates every interleaving of `threads` abstract find_or_put calls on
/// a single line of `slots` buckets (two probe rounds, vectors of two
/// words). Atomic steps: read word, CAS, one data word write, done store,
/// one data word read. Checks, in every interleaving: a reader matching a
/// memo never sees DONE before the data is complete; each vector is
/// INSERTED exactly once and into distinct slots; nothing runs out of
/// slots; and every reachable state can still finish.
CheckResult check_scenario(ProtocolVariant variant, ProtocolScenario scenario,
                           std::size_t threads = 2, std::size_t slots = 2);

/// All scenarios in turn; returns the first violation, or ok with the
/// summed state count.
CheckResult check_bucket_protocol(ProtocolVariant variant, std::size_t threads = 2,
                                  std::size_t slots = 2);

}  // namespace lreach
