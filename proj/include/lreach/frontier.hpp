#pragma once

#include <cstddef>
#include <vector>

#include "lreach/hashing.hpp"

namespace lreach {

enum class SearchOrder { kBfs, kDfs };

/// Per-worker sequence of states awaiting expansion: a queue for pseudo-BFS,
/// a stack for pseudo-DFS. Stored flat in a ring buffer that grows by
/// doubling.
class Frontier {
 public:
  explicit Frontier(std::size_t vector_len = 1);

  std::size_t vector_len() const noexcept { return vector_len_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  void push(StateView state);
  /// Removes the front (bfs) or back (dfs) state into `out`.
  bool pop(SearchOrder order, StateVector& out);
  /// i-th state counted from the front.
  StateView at(std::size_t i) const noexcept;

  void clear() noexcept { head_ = count_ = 0; }
  /// Moves every state of `other` to the back of this frontier.
  void append(Frontier& other);

  /// Splits off floor(size / 2) states, taking every second element so
  /// shallow and deep states are mixed. The kept states stay in order.
  /// Returns an empty frontier when fewer than two states are held.
  Frontier split();

  std::vector<StateVector> to_vectors() const;

 private:
  void grow();
  StateWord* slot(std::size_t i) noexcept {
    return buf_.data() + ((head_ + i) & (capacity_ - 1)) * vector_len_;
  }
  const StateWord* slot(std::size_t i) const noexcept {
    return buf_.data() + ((head_ + i) & (capacity_ - 1)) * vector_len_;
  }

  std::size_t vector_len_;
  std::size_t capacity_ = 0;  // in states, power of two
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::vector<StateWord> buf_;
};

}  // namespace lreach
