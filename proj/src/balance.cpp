#include "lreach/balance.hpp"

#include <thread>

namespace lreach {

PollBoard::PollBoard(std::size_t workers, std::size_t vector_len) {
  slots_.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) slots_.push_back(std::make_unique<Slot>(vector_len));
}

std::size_t PollBoard::answer(std::size_t self, Frontier& frontier, TerminationDetector& term,
                              BalanceStats& stats) {
  Slot& me = *slots_[self];
  const int requester = me.requester.load(std::memory_order_acquire);
  if (requester < 0) return 0;

  Slot& peer = *slots_[static_cast<std::size_t>(requester)];
  std::size_t given = 0;
  if (frontier.size() >= 2) {
    // The requester does not touch its gift until it sees kGranted.
    peer.gift = frontier.split();
    given = peer.gift.size();
    term.add_pending(1);
    ++stats.handoffs;
    stats.states_given += given;
    peer.reply.store(Reply::kGranted, std::memory_order_release);
  } else {
    ++stats.denials;
    peer.reply.store(Reply::kDenied, std::memory_order_release);
  }
  me.requester.store(-1, std::memory_order_release);
  return given;
}

PollBoard::Outcome PollBoard::poll_random(std::size_t self, Frontier& frontier,
                                          std::mt19937_64& rng, TerminationDetector& term,
                                          const std::atomic<bool>& abort, BalanceStats& stats) {
  const std::size_t n = workers();
  if (n < 2) return Outcome::kDenied;

  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::size_t peer = pick(rng);
  if (peer >= self) ++peer;
  ++stats.polls;

  Slot& me = *slots_[self];
  me.reply.store(Reply::kWaiting, std::memory_order_relaxed);
  int expected = -1;
  if (!slots_[peer]->requester.compare_exchange_strong(expected, static_cast<int>(self),
                                                       std::memory_order_acq_rel)) {
    // Someone else is already polling that peer.
    me.reply.store(Reply::kNone, std::memory_order_relaxed);
    return Outcome::kDenied;
  }

  for (unsigned spins = 0;; ++spins) {
    const Reply reply = me.reply.load(std::memory_order_acquire);
    if (reply == Reply::kGranted) {
      frontier.append(me.gift);
      me.reply.store(Reply::kNone, std::memory_order_relaxed);
      return Outcome::kHandoff;
    }
    if (reply == Reply::kDenied) {
      me.reply.store(Reply::kNone, std::memory_order_relaxed);
      return Outcome::kDenied;
    }
    // We hold nothing, so anyone polling us is denied.
    answer(self, frontier, term, stats);
    if (term.terminated() || abort.load(std::memory_order_relaxed)) return Outcome::kTerminated;
    if (spins < 64) {
      cpu_relax();
    } else {
      std::this_thread::yield();
    }
  }
}

}  // namespace lreach
