#include "lreach/partitioned_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace lreach {

std::size_t owner_of(StateView vector, std::size_t workers) noexcept {
  return static_cast<std::size_t>(hash(vector, 1).value % workers);
}

PartitionedStore::PartitionedStore(std::size_t workers, std::size_t vector_len,
                                   unsigned private_bits, std::size_t queue_capacity)
    : vector_len_(vector_len), queue_capacity_(queue_capacity) {
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  if (queue_capacity == 0) throw std::invalid_argument("queue capacity must be >= 1");
  parts_.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    parts_.push_back(std::make_unique<Part>(private_bits, vector_len));
    parts_.back()->inbox.reserve(std::min(queue_capacity, std::size_t{4096}) * vector_len);
  }
}

PartitionedStore::Submit PartitionedStore::submit(StateView vector) {
  return submit_batch(owner_of(vector, workers()), vector);
}

PartitionedStore::Submit PartitionedStore::submit_batch(std::size_t owner,
                                                        std::span<const StateWord> flat) {
  Part& part = *parts_[owner];
  const std::size_t incoming = flat.size() / vector_len_;
  std::lock_guard lock(part.mu);
  const std::size_t held = part.inbox.size() / vector_len_;
  // An empty queue always accepts, so batches larger than the capacity
  // cannot wedge a submitter.
  if (held != 0 && held + incoming > queue_capacity_) return Submit::kFull;
  part.inbox.insert(part.inbox.end(), flat.begin(), flat.end());
  ++part.batches;
  return Submit::kQueued;
}

PartitionedStore::DrainResult PartitionedStore::drain(std::size_t worker,
                                                      std::vector<StateWord>& out) {
  Part& part = *parts_[worker];
  DrainResult result;
  {
    std::lock_guard lock(part.mu);
    if (part.batches == 0) return result;
    part.spare.clear();
    part.spare.swap(part.inbox);
    result.batches = part.batches;
    part.batches = 0;
  }
  for (std::size_t off = 0; off < part.spare.size(); off += vector_len_) {
    const StateView v(part.spare.data() + off, vector_len_);
    const FindOrPut r = part.table.find_or_put(v, part.counters);
    if (r == FindOrPut::kInserted) {
      out.insert(out.end(), v.begin(), v.end());
      ++result.fresh;
    } else if (r == FindOrPut::kTableFull) {
      result.table_full = true;
    }
  }
  return result;
}

FindOrPut PartitionedStore::put_local(std::size_t worker, StateView vector) {
  Part& part = *parts_[worker];
  return part.table.find_or_put(vector, part.counters);
}

bool PartitionedStore::contains(StateView vector) const {
  return parts_[owner_of(vector, workers())]->table.contains(vector);
}

std::size_t PartitionedStore::queued(std::size_t worker) const {
  std::lock_guard lock(parts_[worker]->mu);
  return parts_[worker]->inbox.size() / vector_len_;
}

}  // namespace lreach
