#pragma once

#include <barrier>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "lreach/hashing.hpp"

namespace lreach::testing {

/// Distinct vector per id: the id sits in the first two words.
inline StateVector vec_of(std::uint64_t id, std::size_t len = 4) {
  StateVector v(len, 0);
  v[0] = static_cast<StateWord>(id);
  if (len > 1) v[1] = static_cast<StateWord>(id >> 32);
  for (std::size_t i = 2; i < len; ++i) v[i] = static_cast<StateWord>(id * 2654435761u + i);
  return v;
}

/// Runs body(w) on `workers` threads released together.
inline void run_together(std::size_t workers, const std::function<void(std::size_t)>& body) {
  std::barrier start(static_cast<std::ptrdiff_t>(workers));
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      start.arrive_and_wait();
      body(w);
    });
  }
}

}  // namespace lreach::testing
