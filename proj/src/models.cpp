#include <algorithm>
#include <array>
#include <charconv>
#include <stdexcept>
#include <string>

#include "lreach/model.hpp"

namespace lreach {

std::vector<StateVector> Model::successors(StateView state) const {
  std::vector<StateWord> flat;
  const std::size_t n = next_states(state, flat);
  std::vector<StateVector> out;
  out.reserve(n);
  const std::size_t len = vector_len();
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i * len),
                     flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * len));
  }
  return out;
}

namespace {

class Hanoi final : public Model {
 public:
  explicit Hanoi(int disks) : disks_(static_cast<std::size_t>(disks)) {}

  std::string name() const override { return "hanoi:" + std::to_string(disks_); }
  std::size_t vector_len() const override { return disks_; }
  StateVector initial_state() const override { return StateVector(disks_, 0); }

  std::size_t next_states(StateView state, std::vector<StateWord>& out) const override {
    constexpr std::size_t kNone = ~std::size_t{0};
    std::array<std::size_t, 3> top{kNone, kNone, kNone};
    // Disk 0 is the smallest, so the first disk seen on a peg is its top.
    for (std::size_t d = 0; d < disks_; ++d) {
      auto& t = top[state[d]];
      if (t == kNone) t = d;
    }
    std::size_t n = 0;
    for (StateWord from = 0; from < 3; ++from) {
      if (top[from] == kNone) continue;
      for (StateWord to = 0; to < 3; ++to) {
        if (to == from) continue;
        if (top[to] != kNone && top[to] < top[from]) continue;
        const std::size_t at = out.size();
        out.insert(out.end(), state.begin(), state.end());
        out[at + top[from]] = to;
        ++n;
      }
    }
    return n;
  }

 private:
  std::size_t disks_;
};

class Philosophers final : public Model {
 public:
  static constexpr StateWord kThinking = 0;
  static constexpr StateWord kHasLeft = 1;
  static constexpr StateWord kEating = 2;

  explicit Philosophers(int n) : n_(static_cast<std::size_t>(n)) {}

  std::string name() const override { return "phils:" + std::to_string(n_); }
  std::size_t vector_len() const override { return n_; }
  StateVector initial_state() const override { return StateVector(n_, kThinking); }

  std::size_t next_states(StateView s, std::vector<StateWord>& out) const override {
    // Fork f is philosopher f's left fork and philosopher f-1's right fork.
    auto fork_free = [&](std::size_t f) {
      return s[f] == kThinking && s[(f + n_ - 1) % n_] != kEating;
    };
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      StateWord next;
      if (s[i] == kThinking && fork_free(i)) {
        next = kHasLeft;
      } else if (s[i] == kHasLeft && fork_free((i + 1) % n_)) {
        next = kEating;
      } else if (s[i] == kEating) {
        next = kThinking;
      } else {
        continue;
      }
      const std::size_t at = out.size();
      out.insert(out.end(), s.begin(), s.end());
      out[at + i] = next;
      ++count;
    }
    return count;
  }

 private:
  std::size_t n_;
};

std::uint64_t diamond_width(std::uint64_t width, std::uint64_t depth, std::uint64_t layer) {
  return std::min(layer, 2 * depth - layer) * (width - 1) + 1;
}

class Diamond final : public Model {
 public:
  Diamond(int width, int depth)
      : width_(static_cast<StateWord>(width)), depth_(static_cast<StateWord>(depth)) {}

  std::string name() const override {
    return "diamond:" + std::to_string(width_) + "," + std::to_string(depth_);
  }
  std::size_t vector_len() const override { return 2; }
  StateVector initial_state() const override { return {0, 0}; }

  std::size_t next_states(StateView s, std::vector<StateWord>& out) const override {
    const StateWord layer = s[0];
    const StateWord pos = s[1];
    if (layer >= 2 * depth_) return 0;
    std::size_t n = 0;
    if (layer < depth_) {
      for (StateWord k = 0; k < width_; ++k) {
        out.push_back(layer + 1);
        out.push_back(pos + k);
        ++n;
      }
    } else {
      const auto next_width = diamond_width(width_, depth_, layer + 1);
      for (StateWord k = 0; k < width_ && k <= pos; ++k) {
        if (pos - k >= next_width) continue;
        out.push_back(layer + 1);
        out.push_back(pos - k);
        ++n;
      }
    }
    return n;
  }

 private:
  StateWord width_;
  StateWord depth_;
};

class Helix final : public Model {
 public:
  Helix(int width, int depth)
      : width_(static_cast<StateWord>(width)), depth_(static_cast<StateWord>(depth)) {}

  std::string name() const override {
    return "helix:" + std::to_string(width_) + "," + std::to_string(depth_);
  }
  std::size_t vector_len() const override { return 2; }
  StateVector initial_state() const override { return {0, 0}; }

  std::size_t next_states(StateView s, std::vector<StateWord>& out) const override {
    const StateWord level = s[0];
    const StateWord pos = s[1];
    if (level >= depth_) return 0;
    const StateWord next = level + 1;
    if (level % width_ == 0 || next % width_ == 0) {
      out.push_back(next);
      out.push_back(0);
      return 1;
    }
    out.push_back(next);
    out.push_back(pos);
    out.push_back(next);
    out.push_back(pos + 1);
    return 2;
  }

 private:
  StateWord width_;
  StateWord depth_;
};

void require_range(const char* what, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw std::invalid_argument(std::string(what) + " must be in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "], got " + std::to_string(value));
  }
}

int parse_int(std::string_view text, std::string_view spec) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad number '" + std::string(text) + "' in model spec '" +
                                std::string(spec) + "'");
  }
  return v;
}

std::pair<int, int> parse_pair(std::string_view args, std::string_view spec) {
  const auto comma = args.find(',');
  if (comma == std::string_view::npos) {
    throw std::invalid_argument("expected W,D in model spec '" + std::string(spec) + "'");
  }
  return {parse_int(args.substr(0, comma), spec), parse_int(args.substr(comma + 1), spec)};
}

}  // namespace

std::unique_ptr<Model> make_hanoi(int disks) {
  require_range("hanoi disks", disks, 1, 12);
  return std::make_unique<Hanoi>(disks);
}

std::unique_ptr<Model> make_philosophers(int n) {
  require_range("philosophers", n, 2, 16);
  return std::make_unique<Philosophers>(n);
}

std::unique_ptr<Model> make_synthetic(SyntheticShape shape, int width, int depth) {
  require_range("width", width, 1, 1 << 16);
  require_range("depth", depth, 1, 1 << 24);
  if (shape == SyntheticShape::kDiamond) return std::make_unique<Diamond>(width, depth);
  return std::make_unique<Helix>(width, depth);
}

std::uint64_t diamond_state_count(int width, int depth) {
  std::uint64_t total = 0;
  for (std::uint64_t layer = 0; layer <= 2 * static_cast<std::uint64_t>(depth); ++layer) {
    total += diamond_width(static_cast<std::uint64_t>(width), static_cast<std::uint64_t>(depth),
                           layer);
  }
  return total;
}

std::uint64_t helix_state_count(int width, int depth) {
  std::uint64_t total = 0;
  for (int level = 0; level <= depth; ++level) {
    total += (level % width == 0) ? 1 : static_cast<std::uint64_t>(level % width);
  }
  return total;
}

std::unique_ptr<Model> make_model(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("model spec '" + std::string(spec) + "' lacks ':'");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view args = spec.substr(colon + 1);
  if (kind == "hanoi") return make_hanoi(parse_int(args, spec));
  if (kind == "phils") return make_philosophers(parse_int(args, spec));
  if (kind == "diamond") {
    const auto [w, d] = parse_pair(args, spec);
    return make_synthetic(SyntheticShape::kDiamond, w, d);
  }
  if (kind == "helix") {
    const auto [w, d] = parse_pair(args, spec);
    return make_synthetic(SyntheticShape::kHelix, w, d);
  }
  if (kind == "ets") return load_ets(std::string(args));
  throw std::invalid_argument("unknown model kind '" + std::string(kind) + "'");
}

}  // namespace lreach
