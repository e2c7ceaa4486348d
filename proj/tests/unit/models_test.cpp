#include "doctest.h"

#include <sstream>
#include <stdexcept>
#include <string>

#include "lreach/model.hpp"

using namespace lreach;

namespace {

struct Counts {
  std::uint64_t states, transitions, deadlocks;
};

Counts counts(const Model& m) {
  const auto r = oracle_reach(m);
  return {r.states, r.transitions, r.deadlocks};
}

std::string fixture(const char* name) { return std::string(LREACH_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("hanoi") {
  const auto h1 = make_hanoi(1);
  CHECK(h1->vector_len() == 1);
  CHECK(h1->initial_state() == StateVector{0});
  CHECK(h1->successors(StateVector{0}) == std::vector<StateVector>{{1}, {2}});

  const auto c2 = counts(*make_hanoi(2));
  CHECK(c2.states == 9);
  CHECK(c2.transitions == 24);
  CHECK(c2.deadlocks == 0);
  CHECK(counts(*make_hanoi(3)).transitions == 78);

  std::uint64_t expect = 1;
  for (int n = 1; n <= 8; ++n) {
    expect *= 3;
    CHECK(counts(*make_hanoi(n)).states == expect);
  }
  CHECK_THROWS_AS(make_hanoi(0), std::invalid_argument);
  CHECK_THROWS_AS(make_hanoi(13), std::invalid_argument);
}

TEST_CASE("philosophers") {
  const auto p2 = make_philosophers(2);
  // Both philosophers holding their left fork: no move left.
  CHECK(p2->successors(StateVector{1, 1}).empty());
  CHECK(p2->successors(StateVector{0, 0}).size() == 2);

  const Counts expect[] = {{6, 8, 1},         {14, 27, 1},       {34, 88, 1},
                           {82, 265, 1},      {198, 768, 1},     {478, 2163, 1},
                           {1154, 5968, 1},   {2786, 16209, 1},  {6726, 43480, 1},
                           {16238, 115467, 1}, {39202, 304104, 1}};
  for (int n = 2; n <= 12; ++n) {
    const auto c = counts(*make_philosophers(n));
    const auto& e = expect[n - 2];
    CAPTURE(n);
    CHECK(c.states == e.states);
    CHECK(c.transitions == e.transitions);
    CHECK(c.deadlocks == e.deadlocks);
  }
  CHECK_THROWS_AS(make_philosophers(1), std::invalid_argument);
}

TEST_CASE("diamond matches its closed form") {
  CHECK(diamond_state_count(8, 8) == 465);
  for (auto [w, d] : {std::pair{2, 3}, {3, 3}, {8, 8}, {5, 10}}) {
    CAPTURE(w);
    CAPTURE(d);
    const auto c = counts(*make_synthetic(SyntheticShape::kDiamond, w, d));
    CHECK(c.states == diamond_state_count(w, d));
    CHECK(c.deadlocks == 1);
  }
}

TEST_CASE("helix") {
  // Width 1: a plain chain.
  const auto chain = counts(*make_synthetic(SyntheticShape::kHelix, 1, 5));
  CHECK(chain.states == 6);
  CHECK(chain.transitions == 5);
  CHECK(chain.deadlocks == 1);

  const auto h = make_synthetic(SyntheticShape::kHelix, 4, 1000);
  CHECK(counts(*h).states == helix_state_count(4, 1000));
  CHECK(helix_state_count(4, 1000) == 1751);
  // Convergence levels have a single successor.
  CHECK(h->successors(StateVector{3, 2}).size() == 1);
  CHECK(h->successors(StateVector{4, 0}).size() == 1);
  CHECK(h->successors(StateVector{5, 0}).size() == 2);
}

TEST_CASE("make_model specs") {
  CHECK(make_model("hanoi:3")->name() == "hanoi:3");
  CHECK(make_model("diamond:8,8")->name() == "diamond:8,8");
  CHECK(make_model("helix:4,10")->vector_len() == 2);
  CHECK(make_model("phils:4")->vector_len() == 4);
  CHECK_THROWS_AS(make_model("hanoi"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("tree:3"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("diamond:8"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("hanoi:x"), std::invalid_argument);
}

TEST_CASE("ets fixtures") {
  const auto chain = load_ets(fixture("chain5.ets"));
  CHECK(chain->vector_len() == 1);
  CHECK(chain->edge_count() == 5);
  auto c = counts(*chain);
  CHECK(c.states == 6);
  CHECK(c.transitions == 5);
  CHECK(c.deadlocks == 1);

  c = counts(*load_ets(fixture("loops.ets")));
  CHECK(c.states == 6);
  CHECK(c.transitions == 7);
  CHECK(c.deadlocks == 2);

  c = counts(*load_ets(fixture("cube.ets")));
  CHECK(c.states == 8);
  CHECK(c.transitions == 13);
  CHECK(c.deadlocks == 0);
}

TEST_CASE("ets errors carry source and line") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_ets(in, "t.ets");
  };
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("ets 1\nveclen 2\ninit 0 0\nedge 0 0 -> 1\n");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).rfind("t.ets:4:", 0) == 0);
  }
  CHECK_THROWS_AS(parse("ets 2\n"), ParseError);
  CHECK_THROWS_AS(parse("ets 1\nveclen 0\n"), ParseError);
  CHECK_THROWS_AS(parse("ets 1\nveclen 1\ninit x\n"), ParseError);
  CHECK_THROWS_AS(load_ets(fixture("missing.ets")), std::runtime_error);
}

TEST_CASE("write_ets round-trips") {
  for (const char* spec : {"hanoi:3", "phils:4", "diamond:3,3"}) {
    const auto m = make_model(spec);
    std::stringstream buf;
    write_ets(*m, buf);
    const auto back = parse_ets(buf, spec);
    const auto a = oracle_reach(*m);
    const auto b = oracle_reach(*back);
    CHECK(a.states == b.states);
    CHECK(a.transitions == b.transitions);
    CHECK(a.deadlocks == b.deadlocks);
    CHECK(a.members == b.members);
  }
}
