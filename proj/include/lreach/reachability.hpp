#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lreach/balance.hpp"
#include "lreach/frontier.hpp"
#include "lreach/model.hpp"
#include "lreach/partitioned_store.hpp"
#include "lreach/region_table.hpp"
#include "lreach/state_table.hpp"
#include "lreach/storage.hpp"

namespace lreach {

enum class StorageKind { kLockless, kRegion, kPartitioned };

std::string_view to_string(StorageKind kind) noexcept;
std::string_view to_string(SearchOrder order) noexcept;
std::string_view to_string(BalanceStrategy lb) noexcept;
/// Throw std::invalid_argument on unknown names.
StorageKind parse_storage_kind(std::string_view name);
SearchOrder parse_search_order(std::string_view name);
BalanceStrategy parse_balance(std::string_view name);

struct ExploreConfig {
  std::size_t workers = 1;
  SearchOrder order = SearchOrder::kBfs;
  BalanceStrategy lb = BalanceStrategy::kSrp;
  std::uint64_t seed = 1;
  std::size_t budget = kDefaultWorkBudget;  // iterations between balance points
  std::size_t seed_factor = kDefaultSeedFactor;
  unsigned table_bits = 20;  // used when explore() builds the storage itself
};

struct ExploreReport {
  std::string model;
  StorageKind storage = StorageKind::kLockless;
  std::size_t workers = 1;
  SearchOrder order = SearchOrder::kBfs;
  BalanceStrategy lb = BalanceStrategy::kSrp;

  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t deadlocks = 0;
  std::vector<StateVector> deadlock_samples;
  double wall_ms = 0.0;

  std::vector<StorageStats> per_worker;
  StorageStats totals;
  BalanceStats balance;
};

/// Raised when a run cannot finish; carries the statistics gathered so far.
class ExploreError : public std::runtime_error {
 public:
  ExploreError(const std::string& what, ExploreReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const ExploreReport& partial() const noexcept { return partial_; }

 private:
  ExploreReport partial_;
};

/// Parallel reachability over a shared storage. Instantiated for StateTable
/// and RegionLockedTable.
template <SharedStorage Storage>
ExploreReport explore(const Model& model, Storage& storage, const ExploreConfig& config);

/// Static partitioning: each worker expands only the states it owns and
/// ships foreign successors to their owners. `config.lb` is ignored.
ExploreReport explore_partitioned(const Model& model, PartitionedStore& store,
                                  const ExploreConfig& config);

/// Builds a storage of kind `kind` sized by config.table_bits and explores.
ExploreReport explore(const Model& model, StorageKind kind, const ExploreConfig& config);

/// Private table size per worker for partitioned runs with `table_bits` total.
unsigned partitioned_private_bits(unsigned table_bits, std::size_t workers);

}  // namespace lreach
