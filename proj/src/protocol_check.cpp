#include "lreach/protocol_check.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>

namespace lreach {

std::string_view to_string(ProtocolVariant v) noexcept {
  switch (v) {
    case ProtocolVariant::kCorrect: return "correct";
    case ProtocolVariant::kDataAfterDone: return "data-after-done";
    case ProtocolVariant::kMissingWriteBit: return "missing-write-bit";
  }
  return "?";
}

std::string_view to_string(ProtocolScenario s) noexcept {
  switch (s) {
    case ProtocolScenario::kSameVector: return "same-vector";
    case ProtocolScenario::kDistinctMemos: return "distinct-memos";
    case ProtocolScenario::kSameMemo: return "same-memo";
  }
  return "?";
}

ProtocolVariant parse_protocol_variant(std::string_view name) {
  for (auto v : {ProtocolVariant::kCorrect, ProtocolVariant::kDataAfterDone,
                 ProtocolVariant::kMissingWriteBit}) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown protocol variant '" + std::string(name) + "'");
}

namespace {

constexpr std::size_t kMaxThreads = 3;
constexpr std::size_t kMaxSlots = 4;
constexpr std::size_t kLen = 2;
constexpr std::uint8_t kRounds = 2;

enum Flag : std::uint8_t { kEmpty = 0, kWrite = 1, kDone = 2 };
enum Pc : std::uint8_t { kRead, kCas, kWriteData, kStoreDone, kReadData, kFinished };
enum Result : std::uint8_t { kNone, kInserted, kFound, kTableFull };

struct Thread {
  std::uint8_t pc = kRead;
  std::uint8_t round = 0;
  std::uint8_t probe = 0;  // position within the line
  std::uint8_t k = 0;      // data word index
  std::uint8_t mismatch = 0;
  std::uint8_t result = kNone;
  std::uint8_t result_slot = 0;
};

// Byte-packed so the whole thing can key a hash map.
struct Shared {
  std::array<std::uint8_t, kMaxSlots> memo{};
  std::array<std::uint8_t, kMaxSlots> flag{};
  std::array<std::uint8_t, kMaxSlots> written{};  // data words written since the claim
  std::array<std::array<std::uint8_t, kLen>, kMaxSlots> data{};
  std::array<Thread, kMaxThreads> threads{};

  std::string key() const {
    return std::string(reinterpret_cast<const char*>(this), sizeof(*this));
  }
};
static_assert(sizeof(Shared) == kMaxSlots * (3 + kLen) + kMaxThreads * sizeof(Thread));

struct Actor {
  std::array<std::uint8_t, kLen> vec{};
  std::uint8_t memo = 1;
  std::uint8_t start = 0;
  int id = 0;  // which distinct vector
};

struct Step {
  std::string text;
  std::optional<std::string> violation;
};

class Checker {
 public:
  Checker(ProtocolVariant variant, ProtocolScenario scenario, std::size_t threads,
          std::size_t slots)
      : variant_(variant), threads_(threads), slots_(slots) {
    for (std::size_t t = 0; t < threads; ++t) {
      Actor a;
      a.start = 0;
      switch (scenario) {
        case ProtocolScenario::kSameVector:
          a.vec = {7, 9};
          a.memo = 1;
          a.id = 0;
          break;
        case ProtocolScenario::kDistinctMemos:
          a.vec = {7, static_cast<std::uint8_t>(9 + t)};
          a.memo = static_cast<std::uint8_t>(1 + t);
          a.id = static_cast<int>(t);
          break;
        case ProtocolScenario::kSameMemo:
          a.vec = {7, static_cast<std::uint8_t>(9 + t)};
          a.memo = 1;
          a.id = static_cast<int>(t);
          break;
      }
      actors_[t] = a;
    }
  }

  std::uint8_t slot_of(std::size_t t, const Thread& th) const {
    const std::size_t base = actors_[t].start + th.round;
    return static_cast<std::uint8_t>((base + th.probe) % slots_);
  }

  // Moves to the next probe position; true when the probe budget is gone.
  bool advance(Thread& th) const {
    th.pc = kRead;
    if (++th.probe == slots_) {
      th.probe = 0;
      if (++th.round == kRounds) {
        th.pc = kFinished;
        th.result = kTableFull;
        return true;
      }
    }
    return false;
  }

  Step step(Shared& s, std::size_t t) const {
    Thread& th = s.threads[t];
    const Actor& me = actors_[t];
    const std::uint8_t slot = slot_of(t, th);
    const std::string who = "t" + std::to_string(t) + " ";
    const std::string at = " slot " + std::to_string(slot);
    Step out;

    switch (th.pc) {
      case kRead: {
        const std::uint8_t f = s.flag[slot];
        if (f == kEmpty) {
          out.text = who + "reads" + at + ": empty";
          th.pc = kCas;
        } else if (s.memo[slot] != me.memo) {
          out.text = who + "reads" + at + ": memo " + std::to_string(s.memo[slot]) + ", skips";
          if (advance(th)) out.text += "; out of probes";
        } else if (f == kWrite) {
          out.text = who + "reads" + at + ": matching memo, WRITE, waits";
        } else {
          out.text = who + "reads" + at + ": matching memo, DONE";
          if (s.written[slot] < kLen) {
            out.violation = "done-before-data";
            out.text += " with " + std::to_string(s.written[slot]) + "/" + std::to_string(kLen) +
                        " data words written";
          }
          th.pc = kReadData;
          th.k = 0;
          th.mismatch = 0;
        }
        break;
      }
      case kCas: {
        if (s.flag[slot] != kEmpty) {
          out.text = who + "CAS" + at + " fails";
          th.pc = kRead;
          break;
        }
        s.memo[slot] = me.memo;
        s.written[slot] = 0;
        if (variant_ == ProtocolVariant::kMissingWriteBit) {
          s.flag[slot] = kDone;
          out.text = who + "CAS" + at + " empty -> DONE";
          th.pc = kWriteData;
        } else {
          s.flag[slot] = kWrite;
          out.text = who + "CAS" + at + " empty -> WRITE";
          th.pc = variant_ == ProtocolVariant::kDataAfterDone ? kStoreDone : kWriteData;
        }
        th.k = 0;
        break;
      }
      case kWriteData: {
        s.data[slot][th.k] = me.vec[th.k];
        ++s.written[slot];
        out.text = who + "writes data[" + std::to_string(th.k) + "]" + at;
        if (++th.k == kLen) {
          if (variant_ == ProtocolVariant::kDataAfterDone) {
            th.pc = kFinished;
            th.result = kInserted;
            th.result_slot = slot;
            out.text += "; INSERTED";
          } else {
            th.pc = kStoreDone;
          }
        }
        break;
      }
      case kStoreDone: {
        s.flag[slot] = kDone;
        out.text = who + "stores DONE" + at;
        if (variant_ == ProtocolVariant::kDataAfterDone) {
          th.pc = kWriteData;
          th.k = 0;
        } else {
          th.pc = kFinished;
          th.result = kInserted;
          th.result_slot = slot;
          out.text += "; INSERTED";
        }
        break;
      }
      case kReadData: {
        const std::uint8_t got = s.data[slot][th.k];
        out.text = who + "reads data[" + std::to_string(th.k) + "]" + at + " = " +
                   std::to_string(got);
        if (got != me.vec[th.k]) th.mismatch = 1;
        if (++th.k == kLen) {
          if (th.mismatch == 0) {
            th.pc = kFinished;
            th.result = kFound;
            th.result_slot = slot;
            out.text += "; FOUND";
          } else {
            out.text += "; no match, moves on";
            if (advance(th)) out.text += "; out of probes";
          }
        }
        break;
      }
      default:
        break;
    }
    return out;
  }

  bool finished(const Shared& s) const {
    for (std::size_t t = 0; t < threads_; ++t) {
      if (s.threads[t].pc != kFinished) return false;
    }
    return true;
  }

  // Properties of a completed run; nullopt when fine.
  std::optional<std::string> check_final(const Shared& s, std::string& detail) const {
    std::array<int, kMaxThreads> inserted{};
    std::array<bool, kMaxSlots> used{};
    for (std::size_t t = 0; t < threads_; ++t) {
      const Thread& th = s.threads[t];
      if (th.result == kTableFull) {
        detail = "t" + std::to_string(t) + " ran out of probes";
        return "table-full";
      }
      if (th.result == kInserted) {
        if (used[th.result_slot]) {
          detail = "two inserts landed in slot " + std::to_string(th.result_slot);
          return "distinct-slots";
        }
        used[th.result_slot] = true;
        ++inserted[actors_[t].id];
      }
    }
    for (std::size_t t = 0; t < threads_; ++t) {
      const int n = inserted[actors_[t].id];
      if (n != 1) {
        detail = "vector of t" + std::to_string(t) + " was INSERTED " + std::to_string(n) +
                 " times";
        return "unique-insert";
      }
    }
    return std::nullopt;
  }

  CheckResult run() {
    CheckResult res;
    std::vector<Shared> states;
    std::vector<std::pair<std::uint32_t, std::uint8_t>> parent;  // (state, thread)
    std::vector<std::vector<std::uint32_t>> preds;
    std::unordered_map<std::string, std::uint32_t> index;

    auto intern = [&](const Shared& s, std::uint32_t from, std::uint8_t t) {
      auto [it, fresh] = index.try_emplace(s.key(), static_cast<std::uint32_t>(states.size()));
      if (fresh) {
        states.push_back(s);
        parent.emplace_back(from, t);
        preds.emplace_back();
      }
      return std::pair{it->second, fresh};
    };

    intern(Shared{}, 0, 0);
    std::deque<std::uint32_t> queue{0};
    std::vector<std::uint32_t> terminals;

    while (!queue.empty()) {
      const std::uint32_t cur = queue.front();
      queue.pop_front();
      if (finished(states[cur])) {
        std::string detail;
        if (auto bad = check_final(states[cur], detail)) {
          res.ok = false;
          res.property = *bad;
          res.trace = trace_to(parent, cur);
          res.trace.push_back("final: " + detail);
          res.states_explored = states.size();
          return res;
        }
        terminals.push_back(cur);
        continue;
      }
      for (std::size_t t = 0; t < threads_; ++t) {
        if (states[cur].threads[t].pc == kFinished) continue;
        Shared next = states[cur];
        Step st = step(next, t);
        if (st.violation) {
          res.ok = false;
          res.property = *st.violation;
          res.trace = trace_to(parent, cur);
          res.trace.push_back(std::to_string(res.trace.size() + 1) + ". " + st.text);
          res.states_explored = states.size();
          return res;
        }
        auto [id, fresh] = intern(next, cur, static_cast<std::uint8_t>(t));
        if (id != cur) preds[id].push_back(cur);
        if (fresh) queue.push_back(id);
      }
    }

    // Every state must reach a finished one; anything else can only spin.
    std::vector<char> live(states.size(), 0);
    std::deque<std::uint32_t> back(terminals.begin(), terminals.end());
    for (auto t : terminals) live[t] = 1;
    while (!back.empty()) {
      const auto s = back.front();
      back.pop_front();
      for (auto p : preds[s]) {
        if (!live[p]) {
          live[p] = 1;
          back.push_back(p);
        }
      }
    }
    res.states_explored = states.size();
    for (std::uint32_t s = 0; s < states.size(); ++s) {
      if (!live[s]) {
        res.ok = false;
        res.property = "livelock";
        res.trace = trace_to(parent, s);
        res.trace.push_back("stuck: no interleaving from here finishes");
        return res;
      }
    }
    return res;
  }

 private:
  std::vector<std::string> trace_to(
      const std::vector<std::pair<std::uint32_t, std::uint8_t>>& parent,
      std::uint32_t target) const {
    std::vector<std::uint8_t> schedule;
    for (std::uint32_t s = target; s != 0; s = parent[s].first) schedule.push_back(parent[s].second);
    std::vector<std::string> lines;
    Shared s{};
    for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
      lines.push_back(std::to_string(lines.size() + 1) + ". " + step(s, *it).text);
    }
    return lines;
  }

  ProtocolVariant variant_;
  std::size_t threads_;
  std::size_t slots_;
  std::array<Actor, kMaxThreads> actors_{};
};

}  // namespace

CheckResult check_scenario(ProtocolVariant variant, ProtocolScenario scenario,
                           std::size_t threads, std::size_t slots) {
  if (threads < 1 || threads > kMaxThreads) {
    throw std::invalid_argument("threads must be in [1, " + std::to_string(kMaxThreads) + "]");
  }
  if (slots < threads || slots > kMaxSlots) {
    throw std::invalid_argument("slots must be in [threads, " + std::to_string(kMaxSlots) + "]");
  }
  Checker checker(variant, scenario, threads, slots);
  CheckResult res = checker.run();
  res.scenario = scenario;
  return res;
}

CheckResult check_bucket_protocol(ProtocolVariant variant, std::size_t threads,
                                  std::size_t slots) {
  std::size_t total = 0;
  for (auto sc : {ProtocolScenario::kSameVector, ProtocolScenario::kDistinctMemos,
                  ProtocolScenario::kSameMemo}) {
    CheckResult r = check_scenario(variant, sc, threads, slots);
    total += r.states_explored;
    if (!r.ok) {
      r.states_explored = total;
      return r;
    }
  }
  CheckResult ok;
  ok.states_explored = total;
  return ok;
}

}  // namespace lreach
