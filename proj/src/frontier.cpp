#include "lreach/frontier.hpp"

#include <algorithm>
#include <stdexcept>

namespace lreach {

Frontier::Frontier(std::size_t vector_len) : vector_len_(vector_len) {
  if (vector_len == 0) throw std::invalid_argument("frontier vector_len must be >= 1");
}

void Frontier::grow() {
  const std::size_t new_cap = capacity_ == 0 ? 16 : capacity_ * 2;
  std::vector<StateWord> next(new_cap * vector_len_);
  for (std::size_t i = 0; i < count_; ++i) {
    const StateWord* src = slot(i);
    std::copy(src, src + vector_len_, next.data() + i * vector_len_);
  }
  buf_.swap(next);
  capacity_ = new_cap;
  head_ = 0;
}

void Frontier::push(StateView state) {
  if (count_ == capacity_) grow();
  std::copy(state.begin(), state.end(), slot(count_));
  ++count_;
}

bool Frontier::pop(SearchOrder order, StateVector& out) {
  if (count_ == 0) return false;
  out.resize(vector_len_);
  if (order == SearchOrder::kBfs) {
    const StateWord* src = slot(0);
    std::copy(src, src + vector_len_, out.begin());
    head_ = (head_ + 1) & (capacity_ - 1);
  } else {
    const StateWord* src = slot(count_ - 1);
    std::copy(src, src + vector_len_, out.begin());
  }
  --count_;
  return true;
}

StateView Frontier::at(std::size_t i) const noexcept { return {slot(i), vector_len_}; }

void Frontier::append(Frontier& other) {
  for (std::size_t i = 0; i < other.size(); ++i) push(other.at(i));
  other.clear();
}

Frontier Frontier::split() {
  Frontier given(vector_len_);
  if (count_ < 2) return given;
  Frontier kept(vector_len_);
  for (std::size_t i = 0; i < count_; ++i) {
    (i % 2 == 1 ? given : kept).push(at(i));
  }
  *this = std::move(kept);
  return given;
}

std::vector<StateVector> Frontier::to_vectors() const {
  std::vector<StateVector> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) {
    const StateView v = at(i);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

}  // namespace lreach
