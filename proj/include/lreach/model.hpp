#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lreach/hashing.hpp"

namespace lreach {

/// Immutable transition system over fixed-length integer vectors.
/// next_states is pure and may be called concurrently.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::size_t vector_len() const = 0;
  virtual StateVector initial_state() const = 0;

  /// Appends the successors of `state` to `out`, flat and in move-id order.
  /// Returns the number of successors appended.
  virtual std::size_t next_states(StateView state, std::vector<StateWord>& out) const = 0;

  std::vector<StateVector> successors(StateView state) const;
};

/// Tower of Hanoi: one entry per disk (0 = smallest) holding its peg 0..2.
std::unique_ptr<Model> make_hanoi(int disks);

/// Dining philosophers grabbing the left fork first; one entry per
/// philosopher: 0 thinking, 1 holding the left fork, 2 eating. The state
/// where everyone holds a left fork is a deadlock.
std::unique_ptr<Model> make_philosophers(int n);

enum class SyntheticShape { kDiamond, kHelix };

/// diamond: layers 0..2*depth of (layer, pos); widths grow by width-1 per
/// layer up to `depth`, then shrink back to a single sink.
/// helix: levels 0..depth; every `width`-th level is a single convergence
/// state, in between the level widens by one per step.
std::unique_ptr<Model> make_synthetic(SyntheticShape shape, int width, int depth);

/// Closed-form reachable-state counts of the synthetic shapes.
std::uint64_t diamond_state_count(int width, int depth);
std::uint64_t helix_state_count(int width, int depth);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Explicit transition system read from the line-oriented `ets 1` format.
class ExplicitModel final : public Model {
 public:
  using EdgeMap = std::unordered_map<StateVector, std::vector<StateVector>, VectorHasher>;

  ExplicitModel(std::string name, std::size_t vector_len, StateVector initial, EdgeMap edges);

  std::string name() const override { return name_; }
  std::size_t vector_len() const override { return vector_len_; }
  StateVector initial_state() const override { return initial_; }
  std::size_t next_states(StateView state, std::vector<StateWord>& out) const override;

  std::size_t edge_count() const noexcept { return edge_count_; }

 private:
  std::string name_;
  std::size_t vector_len_;
  StateVector initial_;
  EdgeMap edges_;
  std::size_t edge_count_ = 0;
};

std::unique_ptr<ExplicitModel> parse_ets(std::istream& in, const std::string& source = "<ets>");
std::unique_ptr<ExplicitModel> load_ets(const std::string& path);

/// Writes every reachable edge of `model` in ets format, BFS order.
void write_ets(const Model& model, std::ostream& out);

/// Parses `hanoi:N`, `phils:N`, `diamond:W,D`, `helix:W,D` or `ets:PATH`.
std::unique_ptr<Model> make_model(std::string_view spec);

struct OracleResult {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t deadlocks = 0;
  std::unordered_set<StateVector, VectorHasher> members;
};

/// Sequential BFS with a growable set; ground truth for parallel runs.
OracleResult oracle_reach(const Model& model);

}  // namespace lreach
