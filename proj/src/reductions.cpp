#include "pfmc/reductions.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "pfmc/error.hpp"

namespace pfmc {

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

int to_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("expected an integer, got '" + s + "'", line);
}

}  // namespace

// ---------------------------------------------------------------- 3SAT

void SatInstance::validate() const {
  if (n < 1) throw PreconditionError("a 3SAT instance needs at least one variable");
  for (const auto& c : clauses)
    for (int l : c)
      if (l == 0 || std::abs(l) > n)
        throw PreconditionError("literal " + std::to_string(l) + " is out of range 1.." + std::to_string(n));
}

SatInstance parse_dimacs(std::string_view text) {
  SatInstance s;
  bool header = false;
  int expected = 0, line_no = 0;
  std::vector<int> current;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto toks = tokens_of(line);
    if (toks.empty() || toks[0] == "c") continue;
    if (toks[0] == "%") break;
    if (toks[0] == "p") {
      if (header || toks.size() != 4 || toks[1] != "cnf") throw ParseError("bad problem line", line_no);
      s.n = to_int(toks[2], line_no);
      expected = to_int(toks[3], line_no);
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before the problem line", line_no);
    for (const auto& t : toks) {
      int l = to_int(t, line_no);
      if (l != 0) {
        if (std::abs(l) > s.n) throw ParseError("literal " + t + " exceeds the variable count", line_no);
        current.push_back(l);
        continue;
      }
      if (current.empty()) throw ParseError("empty clause", line_no);
      if (current.size() > 3) throw ParseError("clause with more than three literals", line_no);
      while (current.size() < 3) current.push_back(current.back());
      s.clauses.push_back({current[0], current[1], current[2]});
      current.clear();
    }
  }
  if (!header) throw ParseError("missing problem line", 0);
  if (!current.empty()) throw ParseError("last clause is not terminated by 0", line_no);
  if (static_cast<int>(s.clauses.size()) != expected)
    throw ParseError("problem line announces " + std::to_string(expected) + " clauses, found " +
                         std::to_string(s.clauses.size()),
                     0);
  s.validate();
  return s;
}

std::string print_dimacs(const SatInstance& s) {
  std::ostringstream out;
  out << "p cnf " << s.n << ' ' << s.clauses.size() << '\n';
  for (const auto& c : s.clauses) out << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return out.str();
}

PfmcInstance sat3_to_pfmc(const SatInstance& s) {
  s.validate();
  PfmcInstance inst;
  inst.grammar = parse_grammar_text(R"(
axiom S ;
S -> S F | S T | F | T ;
F -> "a" ;
T -> "a" ;
)");
  inst.word.assign(s.n, "a");
  using namespace pdl;
  PathFormula step = seq(test(atom("S")), down());
  std::vector<NodeFormula> clauses;
  for (const auto& c : s.clauses) {
    std::vector<NodeFormula> lits;
    for (int l : c) lits.push_back(diamond(power(step, std::abs(l)), atom(l > 0 ? "T" : "F")));
    clauses.push_back(disj_all(lits));
  }
  inst.formula = conj_all(clauses);
  return inst;
}

std::vector<bool> comb_valuation(const Tree& t) {
  std::vector<bool> v;
  for (const Tree* s = &t; s;) {
    const Tree* next = nullptr;
    for (const auto& c : s->children) {
      if (c.label == "S") next = &c;
      if (c.label == "T" || c.label == "F") v.push_back(c.label == "T");
    }
    s = next;
  }
  return v;
}

bool satisfies(const SatInstance& s, const std::vector<bool>& valuation) {
  return std::all_of(s.clauses.begin(), s.clauses.end(), [&](const auto& c) {
    return std::any_of(c.begin(), c.end(), [&](int l) { return valuation.at(std::abs(l) - 1) == (l > 0); });
  });
}

std::optional<std::vector<bool>> brute_force_sat(const SatInstance& s) {
  s.validate();
  if (s.n > 30) throw PreconditionError("too many variables for exhaustive search");
  std::vector<bool> v(s.n);
  for (unsigned long bits = 0; bits < (1ul << s.n); ++bits) {
    for (int k = 0; k < s.n; ++k) v[k] = (bits >> k) & 1;
    if (satisfies(s, v)) return v;
  }
  return std::nullopt;
}

SatInstance random_3sat(std::mt19937& rng, int n, int clauses) {
  SatInstance s;
  s.n = n;
  std::uniform_int_distribution<int> var(1, n), sign(0, 1);
  for (int i = 0; i < clauses; ++i) {
    std::array<int, 3> c{};
    for (int& l : c) l = sign(rng) ? var(rng) : -var(rng);
    s.clauses.push_back(c);
  }
  return s;
}

// ---------------------------------------------------------------- LBA

void LbaSpec::validate() const {
  auto fail = [](const std::string& m) { throw PreconditionError("LBA: " + m); };
  if (states.empty()) fail("no states");
  if (std::set<std::string>(states.begin(), states.end()).size() != states.size()) fail("duplicate state");
  if (tape.size() < 2) fail("the tape alphabet needs both endmarkers");
  if (std::set<std::string>(tape.begin(), tape.end()).size() != tape.size()) fail("duplicate tape symbol");
  auto is_state = [&](const std::string& q) { return std::find(states.begin(), states.end(), q) != states.end(); };
  auto is_symbol = [&](const std::string& a) { return std::find(tape.begin(), tape.end(), a) != tape.end(); };
  for (const auto& q : finals)
    if (!is_state(q)) fail("unknown final state '" + q + "'");
  for (const auto& a : input)
    if (!is_symbol(a)) fail("input symbol '" + a + "' is not a tape symbol");
  for (const auto& t : delta) {
    if (!is_state(t.state) || !is_state(t.next)) fail("transition with an unknown state");
    if (!is_symbol(t.read) || !is_symbol(t.write)) fail("transition with an unknown tape symbol");
    if (t.move < -1 || t.move > 1) fail("moves must be -1, 0 or +1");
    bool left = t.read == left_marker(), right = t.read == right_marker();
    if ((left || right) != (t.write == left_marker() || t.write == right_marker()) ||
        ((left || right) && t.write != t.read))
      fail("transitions may neither erase nor write an endmarker");
    if ((left && t.move < 0) || (right && t.move > 0)) fail("transitions may not cross an endmarker");
  }
}

LbaSpec parse_lba(std::string_view text) {
  LbaSpec m;
  std::string initial;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    std::vector<std::string> args(toks.begin() + 1, toks.end());
    const std::string& kw = toks[0];
    if (kw == "states") {
      m.states.insert(m.states.end(), args.begin(), args.end());
    } else if (kw == "initial") {
      if (args.size() != 1 || !initial.empty()) throw ParseError("exactly one initial state expected", line_no);
      initial = args[0];
    } else if (kw == "final") {
      m.finals.insert(args.begin(), args.end());
    } else if (kw == "tape") {
      m.tape.insert(m.tape.end(), args.begin(), args.end());
    } else if (kw == "input") {
      m.input.insert(args.begin(), args.end());
    } else if (kw == "delta") {
      if (args.size() != 6 || args[2] != "->") throw ParseError("expected 'delta q a -> q' a' d'", line_no);
      int d = to_int(args[5], line_no);
      m.delta.push_back({args[0], args[1], args[3], args[4], d});
    } else {
      throw ParseError("unknown declaration '" + kw + "'", line_no);
    }
  }
  if (initial.empty()) throw ParseError("missing initial state", 0);
  auto it = std::find(m.states.begin(), m.states.end(), initial);
  if (it == m.states.end()) throw ParseError("initial state '" + initial + "' is not declared", 0);
  std::rotate(m.states.begin(), it, it + 1);
  m.validate();
  return m;
}

std::string print_lba(const LbaSpec& m) {
  std::ostringstream out;
  auto line = [&](const char* kw, const auto& xs) {
    out << kw;
    for (const auto& x : xs) out << ' ' << x;
    out << '\n';
  };
  line("states", m.states);
  out << "initial " << m.states.at(0) << '\n';
  line("final", m.finals);
  line("tape", m.tape);
  line("input", m.input);
  for (const auto& t : m.delta)
    out << "delta " << t.state << ' ' << t.read << " -> " << t.next << ' ' << t.write << ' '
        << (t.move > 0 ? "+1" : std::to_string(t.move)) << '\n';
  return out.str();
}

namespace {

void check_input_word(const LbaSpec& m, const std::vector<std::string>& x) {
  if (x.size() < 2 || x.front() != m.left_marker() || x.back() != m.right_marker())
    throw PreconditionError("the input word must be enclosed in the endmarkers");
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if (!m.input.count(x[i]) || x[i] == m.left_marker() || x[i] == m.right_marker())
      throw PreconditionError("'" + x[i] + "' is not an input symbol");
}

}  // namespace

bool lba_accepts(const LbaSpec& m, const std::vector<std::string>& x) {
  m.validate();
  check_input_word(m, x);
  using Config = std::tuple<std::string, int, std::vector<std::string>>;
  std::set<Config> seen;
  std::deque<Config> todo;
  auto push = [&](Config c) {
    if (seen.insert(c).second) todo.push_back(std::move(c));
  };
  push({m.states[0], 0, x});
  while (!todo.empty()) {
    auto [q, h, tape] = todo.front();
    todo.pop_front();
    if (m.finals.count(q)) return true;
    for (const auto& t : m.delta) {
      if (t.state != q || t.read != tape[h]) continue;
      int h2 = h + t.move;
      if (h2 < 0 || h2 >= static_cast<int>(tape.size())) continue;
      auto next = tape;
      next[h] = t.write;
      push({t.next, h2, std::move(next)});
    }
  }
  return false;
}

PfmcInstance lba_to_pfmc(const LbaSpec& m, const std::vector<std::string>& x) {
  m.validate();
  check_input_word(m, x);
  const int n = static_cast<int>(x.size());
  const int l = static_cast<int>(m.states.size());
  const int w = static_cast<int>(m.tape.size());
  auto state_index = [&](const std::string& q) {
    return static_cast<int>(std::find(m.states.begin(), m.states.end(), q) - m.states.begin()) + 1;
  };
  auto symbol_index = [&](const std::string& a) {
    return static_cast<int>(std::find(m.tape.begin(), m.tape.end(), a) - m.tape.begin()) + 1;
  };

  PfmcInstance inst;
  inst.grammar = parse_grammar_text(R"(
axiom S ;
S -> H | Hbar ;
H -> H | Hbar | C | Cbar ;
Hbar -> H | Hbar | C | Cbar ;
C -> C | Cbar | A | Abar ;
Cbar -> C | Cbar | A | Abar ;
A -> A | Abar | S | "a" ;
Abar -> A | Abar | S | "a" ;
)");
  inst.word = {"a"};

  using namespace pdl;
  auto below = [](int k, NodeFormula f) { return k == 0 ? f : diamond(power(down(), k), f); };
  // exactly the k-th of `count` nodes below carries `yes`
  auto one_hot = [&](int count, int k, const char* yes, const char* no) {
    std::vector<NodeFormula> parts;
    for (int i = 1; i <= count; ++i) parts.push_back(below(i, atom(i == k ? yes : no)));
    return conj_all(parts);
  };
  auto head = [&](int h) { return one_hot(n, h, "H", "Hbar"); };
  auto state = [&](int k) { return below(n, one_hot(l, k, "C", "Cbar")); };
  auto cell = [&](int i, int j) { return below(n + l + (i - 1) * w, one_hot(w, j, "A", "Abar")); };
  auto next = [&](NodeFormula f) { return below(n + l + n * w + 1, std::move(f)); };
  auto everywhere = [](NodeFormula f) { return box(star(down()), std::move(f)); };
  NodeFormula S = atom("S"), a = atom("a");

  std::vector<NodeFormula> heads, states, cells;
  for (int h = 1; h <= n; ++h) heads.push_back(head(h));
  for (int k = 1; k <= l; ++k) states.push_back(state(k));
  for (int i = 1; i <= n; ++i) {
    std::vector<NodeFormula> any;
    for (int j = 1; j <= w; ++j) any.push_back(cell(i, j));
    cells.push_back(disj_all(any));
  }
  NodeFormula conf = everywhere(
      implies(S, conj_all({disj_all(heads), disj_all(states), conj_all(cells), next(disj(a, S))})));

  std::vector<NodeFormula> init{S, head(1), state(1)};
  for (int i = 1; i <= n; ++i) init.push_back(cell(i, symbol_index(x[i - 1])));

  std::vector<NodeFormula> finals;
  for (const auto& q : m.finals) finals.push_back(state(state_index(q)));
  NodeFormula fin = everywhere(implies(conj(S, next(a)), disj_all(finals)));

  std::vector<NodeFormula> moves;
  for (int h = 1; h <= n; ++h) {
    // every other cell keeps its symbol
    std::vector<NodeFormula> frame;
    for (int i = 1; i <= n; ++i) {
      if (i == h) continue;
      std::vector<NodeFormula> keep;
      for (int j = 1; j <= w; ++j) keep.push_back(conj(cell(i, j), next(cell(i, j))));
      frame.push_back(disj_all(keep));
    }
    NodeFormula unchanged = conj_all(frame);
    for (const auto& t : m.delta) {
      int h2 = h + t.move;
      if (h2 < 1 || h2 > n) continue;
      moves.push_back(conj_all({head(h), state(state_index(t.state)), cell(h, symbol_index(t.read)), unchanged,
                                next(conj_all({head(h2), state(state_index(t.next)),
                                               cell(h, symbol_index(t.write))}))}));
    }
  }
  NodeFormula trans = everywhere(implies(conj(S, neg(next(a))), disj_all(moves)));

  inst.formula = conj_all({conf, conj_all(init), fin, trans});
  return inst;
}

}  // namespace pfmc
