#include "doctest.h"

#include <atomic>
#include <unordered_set>
#include <vector>

#include "lreach/model.hpp"
#include "lreach/partitioned_store.hpp"
#include "lreach/reachability.hpp"
#include "lreach/region_table.hpp"
#include "lreach/state_table.hpp"
#include "support.hpp"

using namespace lreach;
using lreach::testing::run_together;
using lreach::testing::vec_of;

TEST_CASE("region table matches the lockless layout single-threaded") {
  StateTable lockless(14, 3);
  RegionLockedTable region(14, 3);
  StorageCounters a, b;
  for (std::uint64_t id = 0; id < 12000; ++id) {
    const auto v = vec_of(id % 9000, 3);
    CHECK(lockless.find_or_put(v, a) == region.find_or_put(v, b));
  }
  std::size_t same = 0;
  for (std::size_t s = 0; s < lockless.capacity(); ++s) {
    same += lockless.bucket_word(s) == region.bucket_word(s);
  }
  CHECK(same == lockless.capacity());
  CHECK(region.count_done() == 9000);
}

TEST_CASE("region geometry") {
  RegionLockedTable t(12, 2);
  CHECK(t.regions() == 1024);
  CHECK(t.region_of(0) == 0);
  CHECK(t.region_of(4) == 1);
  CHECK(t.region_of(4095) == 1023);
  RegionLockedTable small(6, 2);
  CHECK(small.regions() == 64);
}

TEST_CASE("region table under 8 workers matches the sequential set") {
  const std::size_t workers = 8;
  const std::uint64_t n = 200000;
  RegionLockedTable t(18, 4);
  std::vector<StorageCounters> counters(workers);
  std::atomic<std::uint64_t> inserted{0};
  run_together(workers, [&](std::size_t w) {
    std::uint64_t local = 0;
    for (std::uint64_t i = w; i < n; i += workers) {
      // 30% of the stream repeats an earlier id.
      const std::uint64_t id = (i % 10 < 3) ? i / 2 : i;
      if (t.find_or_put(vec_of(id), counters[w]) == FindOrPut::kInserted) ++local;
    }
    inserted.fetch_add(local);
  });
  std::unordered_set<std::uint64_t> oracle;
  for (std::uint64_t i = 0; i < n; ++i) oracle.insert((i % 10 < 3) ? i / 2 : i);
  CHECK(inserted.load() == oracle.size());
  CHECK(t.count_done() == oracle.size());
  bool all = true;
  for (auto id : oracle) all = all && t.contains(vec_of(id));
  CHECK(all);
}

TEST_CASE("owner_of spreads vectors evenly") {
  std::vector<std::size_t> hist(8, 0);
  for (std::uint64_t id = 0; id < 100000; ++id) ++hist[owner_of(vec_of(id), 8)];
  for (auto h : hist) {
    CHECK(h >= 12500 - 1200);
    CHECK(h <= 12500 + 1200);
  }
  CHECK(owner_of(vec_of(5), 1) == 0);
}

TEST_CASE("submit and drain dedup against the owner's set") {
  PartitionedStore store(2, 4, 8);
  const auto v = vec_of(11);
  const std::size_t owner = owner_of(v, 2);
  std::vector<StateWord> out;

  CHECK(store.submit(v) == PartitionedStore::Submit::kQueued);
  CHECK(store.queued(owner) == 1);
  auto r = store.drain(owner, out);
  CHECK(r.fresh == 1);
  CHECK(r.batches == 1);
  CHECK(out.size() == 4);
  CHECK(store.contains(v));
  CHECK(store.stored(owner) == 1);

  out.clear();
  store.submit(v);
  r = store.drain(owner, out);
  CHECK(r.fresh == 0);
  CHECK(out.empty());
  CHECK(store.put_local(owner, v) == FindOrPut::kFound);
  CHECK(store.put_local(owner, vec_of(12)) == FindOrPut::kInserted);
}

TEST_CASE("bounded queue refuses when full but always accepts when empty") {
  PartitionedStore store(2, 1, 8, 2);
  std::vector<StateVector> mine;
  for (std::uint64_t id = 0; mine.size() < 4; ++id) {
    if (owner_of(vec_of(id, 1), 2) == 0) mine.push_back(vec_of(id, 1));
  }
  CHECK(store.submit(mine[0]) == PartitionedStore::Submit::kQueued);
  CHECK(store.submit(mine[1]) == PartitionedStore::Submit::kQueued);
  CHECK(store.submit(mine[2]) == PartitionedStore::Submit::kFull);
  std::vector<StateWord> out;
  store.drain(0, out);
  // A batch larger than the capacity still goes into an empty queue.
  std::vector<StateWord> flat;
  for (auto& v : mine) flat.insert(flat.end(), v.begin(), v.end());
  CHECK(store.submit_batch(0, flat) == PartitionedStore::Submit::kQueued);
}

TEST_CASE("partitioned exploration of hanoi(3)") {
  const auto model = make_hanoi(3);
  for (std::size_t workers : {1, 2, 4}) {
    PartitionedStore store(workers, 3, 8);
    ExploreConfig cfg;
    cfg.workers = workers;
    const auto r = explore_partitioned(*model, store, cfg);
    CHECK(r.states == 27);
    CHECK(r.transitions == 78);
    CHECK(r.deadlocks == 0);
  }
}
