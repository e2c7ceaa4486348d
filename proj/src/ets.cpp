#include <charconv>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "lreach/model.hpp"

namespace lreach {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

ExplicitModel::ExplicitModel(std::string name, std::size_t vector_len, StateVector initial,
                             EdgeMap edges)
    : name_(std::move(name)),
      vector_len_(vector_len),
      initial_(std::move(initial)),
      edges_(std::move(edges)) {
  for (const auto& [from, targets] : edges_) edge_count_ += targets.size();
}

std::size_t ExplicitModel::next_states(StateView state, std::vector<StateWord>& out) const {
  const auto it = edges_.find(StateVector(state.begin(), state.end()));
  if (it == edges_.end()) return 0;
  for (const auto& target : it->second) out.insert(out.end(), target.begin(), target.end());
  return it->second.size();
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

class EtsReader {
 public:
  EtsReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::unique_ptr<ExplicitModel> read() {
    expect_header();
    const std::size_t len = read_veclen();
    StateVector init = read_init(len);
    ExplicitModel::EdgeMap edges;
    std::vector<std::string_view> tokens;
    while (next_line(tokens)) {
      if (tokens[0] != "edge") fail("expected 'edge', got '" + std::string(tokens[0]) + "'");
      if (tokens.size() != 2 * len + 2 || tokens[len + 1] != "->") {
        fail("edge needs " + std::to_string(len) + " source values, '->', and " +
             std::to_string(len) + " target values (vector length mismatch or malformed edge)");
      }
      StateVector from = parse_vector(tokens, 1, len);
      StateVector to = parse_vector(tokens, len + 2, len);
      edges[std::move(from)].push_back(std::move(to));
    }
    std::string name = source_;
    return std::make_unique<ExplicitModel>("ets:" + name, len, std::move(init), std::move(edges));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  // Next line with content, comments stripped. Tokens view into line_.
  bool next_line(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      std::string_view view(line_);
      if (const auto hash = view.find('#'); hash != std::string_view::npos) {
        view = view.substr(0, hash);
      }
      tokens = split_ws(view);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  void expect_header() {
    std::vector<std::string_view> tokens;
    if (!next_line(tokens)) fail("empty file, expected 'ets 1'");
    if (tokens.size() != 2 || tokens[0] != "ets" || tokens[1] != "1") fail("expected 'ets 1'");
  }

  std::size_t read_veclen() {
    std::vector<std::string_view> tokens;
    if (!next_line(tokens)) fail("missing 'veclen K'");
    if (tokens.size() != 2 || tokens[0] != "veclen") fail("expected 'veclen K'");
    const StateWord k = parse_value(tokens[1]);
    if (k == 0) fail("veclen must be >= 1");
    return k;
  }

  StateVector read_init(std::size_t len) {
    std::vector<std::string_view> tokens;
    if (!next_line(tokens)) fail("missing 'init' line");
    if (tokens[0] != "init") fail("expected 'init'");
    if (tokens.size() != len + 1) {
      fail("init has " + std::to_string(tokens.size() - 1) + " values, veclen is " +
           std::to_string(len));
    }
    return parse_vector(tokens, 1, len);
  }

  StateVector parse_vector(const std::vector<std::string_view>& tokens, std::size_t at,
                           std::size_t len) const {
    StateVector v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = parse_value(tokens[at + i]);
    return v;
  }

  StateWord parse_value(std::string_view token) const {
    StateWord v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      fail("bad value '" + std::string(token) + "'");
    }
    return v;
  }

  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void write_vector(std::ostream& out, const StateWord* v, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out << ' ' << v[i];
}

}  // namespace

std::unique_ptr<ExplicitModel> parse_ets(std::istream& in, const std::string& source) {
  return EtsReader(in, source).read();
}

std::unique_ptr<ExplicitModel> load_ets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ets file '" + path + "'");
  return parse_ets(in, path);
}

void write_ets(const Model& model, std::ostream& out) {
  const std::size_t len = model.vector_len();
  const StateVector init = model.initial_state();
  out << "ets 1\nveclen " << len << "\ninit";
  write_vector(out, init.data(), len);
  out << '\n';

  std::unordered_set<StateVector, VectorHasher> seen{init};
  std::deque<StateVector> queue{init};
  std::vector<StateWord> succ;
  while (!queue.empty()) {
    const StateVector s = std::move(queue.front());
    queue.pop_front();
    succ.clear();
    const std::size_t n = model.next_states(s, succ);
    for (std::size_t i = 0; i < n; ++i) {
      const StateWord* t = succ.data() + i * len;
      out << "edge";
      write_vector(out, s.data(), len);
      out << " ->";
      write_vector(out, t, len);
      out << '\n';
      StateVector tv(t, t + len);
      if (seen.insert(tv).second) queue.push_back(std::move(tv));
    }
  }
}

}  // namespace lreach
