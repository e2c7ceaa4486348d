#include <deque>

#include "lreach/model.hpp"

namespace lreach {

OracleResult oracle_reach(const Model& model) {
  OracleResult result;
  const std::size_t len = model.vector_len();
  StateVector init = model.initial_state();
  result.members.insert(init);
  std::deque<StateVector> queue{std::move(init)};
  std::vector<StateWord> succ;

  while (!queue.empty()) {
    const StateVector s = std::move(queue.front());
    queue.pop_front();
    succ.clear();
    const std::size_t n = model.next_states(s, succ);
    result.transitions += n;
    if (n == 0) ++result.deadlocks;
    for (std::size_t i = 0; i < n; ++i) {
      StateVector t(succ.begin() + static_cast<std::ptrdiff_t>(i * len),
                    succ.begin() + static_cast<std::ptrdiff_t>((i + 1) * len));
      if (result.members.insert(t).second) queue.push_back(std::move(t));
    }
  }
  result.states = result.members.size();
  return result;
}

}  // namespace lreach
