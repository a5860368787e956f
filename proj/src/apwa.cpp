#include "pfmc/apwa.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "pfmc/error.hpp"

namespace pfmc {

// ---------------------------------------------------------------- streams

namespace {

void encode_into(const Tree& t, StreamWord& out) {
  if (t.label == kStreamRoot)
    throw PreconditionError(std::string("label '") + kStreamRoot + "' is reserved for the stream wrapper");
  out.push_back({t.label, true});
  for (const auto& c : t.children) encode_into(c, out);
  out.push_back({t.label, false});
}

}  // namespace

StreamWord stream_encode(const Tree& t) {
  StreamWord out{{kStreamRoot, true}};
  encode_into(t, out);
  out.push_back({kStreamRoot, false});
  return out;
}

Tree stream_decode(const StreamWord& w) {
  if (w.size() < 4 || w.front() != Tag{kStreamRoot, true} || w.back() != Tag{kStreamRoot, false})
    throw ParseError("stream must be a single tree wrapped in <r> ... </r>", 0);
  std::vector<Tree> stack;
  std::optional<Tree> result;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const Tag& t = w[i];
    if (t.name == kStreamRoot) throw ParseError("wrapper tag inside the stream", 0);
    if (t.open) {
      if (result) throw ParseError("more than one tree in the stream", 0);
      stack.emplace_back(t.name);
      continue;
    }
    if (stack.empty() || stack.back().label != t.name)
      throw ParseError("unmatched closing tag </" + t.name + ">", 0);
    Tree done = std::move(stack.back());
    stack.pop_back();
    if (stack.empty())
      result = std::move(done);
    else
      stack.back().children.push_back(std::move(done));
  }
  if (!stack.empty() || !result) throw ParseError("unterminated stream", 0);
  return *result;
}

std::string stream_text(const StreamWord& w) {
  std::string out;
  for (const auto& t : w) {
    if (!out.empty()) out += ' ';
    out += t.open ? "<" + t.name + ">" : "</" + t.name + ">";
  }
  return out;
}

StreamWord parse_stream_text(std::string_view s) {
  StreamWord out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    bool ok = tok.size() >= 3 && tok.front() == '<' && tok.back() == '>';
    bool close = ok && tok[1] == '/';
    std::string name = ok ? tok.substr(close ? 2 : 1, tok.size() - (close ? 3 : 2)) : "";
    if (!ok || name.empty() || name.find_first_of("<>/") != std::string::npos)
      throw ParseError("bad tag '" + tok + "'", 0);
    out.push_back({name, !close});
  }
  return out;
}

// ---------------------------------------------------------------- Apwa

Apwa::Apwa(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  pool_.push_back({Formula::Kind::top});
  pool_.push_back({Formula::Kind::bot});
}

int Apwa::letter(const Tag& t) const {
  if (t.name == kStreamRoot) return t.open ? 0 : 1;
  auto it = std::find(symbols_.begin(), symbols_.end(), t.name);
  if (it == symbols_.end()) return -1;
  return 2 + 2 * static_cast<int>(it - symbols_.begin()) + (t.open ? 0 : 1);
}

Tag Apwa::tag(int letter) const {
  if (letter < 2) return {kStreamRoot, letter == 0};
  return {symbols_[symbol_of(letter)], is_open(letter)};
}

int Apwa::add_state(int color) {
  color_.push_back(color);
  delta_.emplace_back(letters(), bot());
  return size() - 1;
}

void Apwa::set_delta_all(int q, int f) { std::fill(delta_[q].begin(), delta_[q].end(), f); }

int Apwa::intern(const Formula& f) {
  auto key = std::make_tuple(static_cast<int>(f.kind), f.kind == Formula::Kind::atom ? f.state : f.lhs,
                             f.kind == Formula::Kind::atom ? f.dir : f.rhs, 0);
  auto [it, fresh] = index_.emplace(key, static_cast<int>(pool_.size()));
  if (fresh) pool_.push_back(f);
  return it->second;
}

int Apwa::atom(int q, int dir) {
  Formula f;
  f.kind = Formula::Kind::atom;
  f.state = q;
  f.dir = dir;
  return intern(f);
}

int Apwa::conj(int a, int b) {
  if (a == bot() || b == bot()) return bot();
  if (a == top()) return b;
  if (b == top() || a == b) return a;
  Formula f;
  f.kind = Formula::Kind::conj;
  f.lhs = std::min(a, b);
  f.rhs = std::max(a, b);
  return intern(f);
}

int Apwa::disj(int a, int b) {
  if (a == top() || b == top()) return top();
  if (a == bot()) return b;
  if (b == bot() || a == b) return a;
  Formula f;
  f.kind = Formula::Kind::disj;
  f.lhs = std::min(a, b);
  f.rhs = std::max(a, b);
  return intern(f);
}

namespace {

// Rebuilds formula `id` of `src` inside `dst`, shifting states and
// optionally swapping the connectives and constants.
int copy_formula(const Apwa& src, int id, Apwa& dst, int offset, bool swap,
                 std::unordered_map<int, int>& memo) {
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  const auto& f = src.formula(id);
  using K = Apwa::Formula::Kind;
  int out = 0;
  switch (f.kind) {
    case K::top: out = swap ? dst.bot() : dst.top(); break;
    case K::bot: out = swap ? dst.top() : dst.bot(); break;
    case K::atom: out = dst.atom(f.state + offset, f.dir); break;
    case K::conj:
    case K::disj: {
      int l = copy_formula(src, f.lhs, dst, offset, swap, memo);
      int r = copy_formula(src, f.rhs, dst, offset, swap, memo);
      out = (f.kind == K::conj) != swap ? dst.conj(l, r) : dst.disj(l, r);
      break;
    }
  }
  return memo[id] = out;
}

int absorb_impl(Apwa& dst, const Apwa& b, bool swap, int color_shift) {
  int offset = dst.size();
  for (int q = 0; q < b.size(); ++q) dst.add_state(b.color(q) + color_shift);
  std::unordered_map<int, int> memo;
  for (int q = 0; q < b.size(); ++q)
    for (int x = 0; x < b.letters(); ++x)
      dst.set_delta(q + offset, x, copy_formula(b, b.delta(q, x), dst, offset, swap, memo));
  for (int q : b.continuation()) dst.mark_continuation(q + offset);
  return offset;
}

void require_same_alphabet(const Apwa& a, const Apwa& b) {
  if (a.symbols() != b.symbols()) throw PreconditionError("automata over different alphabets");
}

Apwa combine(const Apwa& a, const Apwa& b, bool conjunctive) {
  require_same_alphabet(a, b);
  Apwa c(a.symbols());
  int oa = c.absorb(a), ob = c.absorb(b);
  int init = c.add_state(1);
  int ia = c.atom(a.initial() + oa, 0), ib = c.atom(b.initial() + ob, 0);
  c.set_delta_all(init, conjunctive ? c.conj(ia, ib) : c.disj(ia, ib));
  c.set_initial(init);
  return c;
}

}  // namespace

int Apwa::absorb(const Apwa& b) {
  if (b.symbols() != symbols_) throw PreconditionError("automata over different alphabets");
  return absorb_impl(*this, b, false, 0);
}

std::string Apwa::describe() const {
  std::set<int> colors(color_.begin(), color_.end());
  std::ostringstream out;
  out << size() << " states, " << pool_.size() << " formulas, " << symbols_.size() << " symbols, colors {";
  bool first = true;
  for (int c : colors) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << "}";
  return out.str();
}

Apwa dual(const Apwa& a) {
  Apwa d(a.symbols());
  absorb_impl(d, a, true, 1);
  d.set_initial(a.initial());
  return d;
}

Apwa conjoin(const Apwa& a, const Apwa& b) { return combine(a, b, true); }
Apwa disjoin(const Apwa& a, const Apwa& b) { return combine(a, b, false); }

Apwa at_root(const Apwa& a) {
  Apwa c(a.symbols());
  int off = c.absorb(a);
  int init = c.add_state(1);
  c.set_delta(init, 0, c.atom(a.initial() + off, +1));
  c.set_initial(init);
  return c;
}

// ---------------------------------------------------------------- DTD automaton

std::vector<std::string> dtd_symbols(const Dtd& d) {
  std::set<std::string> names;
  if (!d.start.empty()) names.insert(d.start);
  for (const auto& [x, a] : d.content) {
    names.insert(x);
    for (const auto& y : a.alphabet()) names.insert(y);
  }
  names.erase(kStreamRoot);
  return {names.begin(), names.end()};
}

Apwa compile_dtd(const Dtd& d, int n) {
  if (!is_nonrecursive(d)) throw PreconditionError("DTD automaton needs a non-recursive DTD");
  Apwa a(dtd_symbols(d));
  const auto& syms = a.symbols();
  const int m = static_cast<int>(syms.size());
  auto sym = [&](const std::string& x) {
    return static_cast<int>(std::find(syms.begin(), syms.end(), x) - syms.begin());
  };
  auto open = [](int k) { return 2 + 2 * k; };
  auto close = [](int k) { return 3 + 2 * k; };

  // depths at which each symbol may occur, from the start symbol
  std::vector<std::set<int>> depths(m);
  std::vector<Nfa> models(m);
  std::vector<bool> has_model(m, false);
  for (int k = 0; k < m; ++k)
    if (auto it = d.content.find(syms[k]); it != d.content.end()) {
      models[k] = it->second.trimmed();
      has_model[k] = true;
    }
  if (d.content.count(d.start) && n >= 1) {
    std::deque<std::pair<int, int>> todo{{sym(d.start), 1}};
    depths[sym(d.start)].insert(1);
    while (!todo.empty()) {
      auto [k, dep] = todo.front();
      todo.pop_front();
      if (dep >= n || !has_model[k]) continue;
      for (const auto& e : models[k].edges) {
        int c = sym(e.letter);
        if (depths[c].insert(dep + 1).second) todo.push_back({c, dep + 1});
      }
    }
  }

  const int init = a.add_state(1);
  a.set_initial(init);
  if (!d.content.count(d.start) || n < 1) return a;  // empty language

  // skip[c], c = 1..n: inside a subtree at relative depth c; the state
  // after the subtree is supplied by `after`.
  std::map<std::pair<int, int>, int> node_state;  // (symbol, depth) -> state
  std::function<int(int, int)> node = [&](int k, int dep) -> int {
    if (auto it = node_state.find({k, dep}); it != node_state.end()) return it->second;
    int q = a.add_state(1);
    node_state[{k, dep}] = q;
    if (!has_model[k]) return q;  // rejects
    const Nfa& nfa = models[k];
    // content[s]: at relative level 1 below the node, NFA in state s
    std::vector<int> content(nfa.size);
    for (int s = 0; s < nfa.size; ++s) content[s] = a.add_state(1);
    // skip states return to content[s] after one child subtree
    std::map<std::pair<int, int>, int> skip;  // (s, c) -> state
    std::function<int(int, int)> skipper = [&](int s, int c) -> int {
      if (auto it = skip.find({s, c}); it != skip.end()) return it->second;
      int st = a.add_state(1);
      skip[{s, c}] = st;
      for (int y = 0; y < m; ++y) {
        if (dep + 1 + c <= n) a.set_delta(st, open(y), a.atom(skipper(s, c + 1), +1));
        a.set_delta(st, close(y), a.atom(c == 1 ? content[s] : skipper(s, c - 1), +1));
      }
      return st;
    };
    for (int s = 0; s < nfa.size; ++s) {
      for (const auto& e : nfa.edges) {
        if (e.from != s) continue;
        int y = sym(e.letter);
        if (!depths[y].count(dep + 1)) continue;
        int step = a.conj(a.atom(node(y, dep + 1), 0), a.atom(skipper(e.to, 1), +1));
        a.set_delta(content[s], open(y), a.disj(a.delta(content[s], open(y)), step));
      }
      if (nfa.final.count(s)) a.set_delta(content[s], close(k), a.top());
    }
    int start = a.bot();
    for (int s : nfa.initial) start = a.disj(start, a.atom(content[s], +1));
    a.set_delta(q, open(k), start);
    return q;
  };

  const int k0 = sym(d.start);
  int root = node(k0, 1);
  // after the root's subtree only the wrapper's closing tag may follow
  int end = a.add_state(1);
  a.set_delta(end, 1, a.top());
  std::vector<int> tail(n + 1);
  for (int c = 1; c <= n; ++c) tail[c] = a.add_state(1);
  for (int c = 1; c <= n; ++c)
    for (int y = 0; y < m; ++y) {
      if (c < n) a.set_delta(tail[c], open(y), a.atom(tail[c + 1], +1));
      a.set_delta(tail[c], close(y), a.atom(c == 1 ? end : tail[c - 1], +1));
    }
  int body = a.add_state(1);
  a.set_delta(body, open(k0), a.conj(a.atom(root, 0), a.atom(tail[1], +1)));
  a.set_delta(init, 0, a.atom(body, +1));
  return a;
}

// ---------------------------------------------------------------- games

int ParityGame::add_vertex(int o, int p) {
  owner.push_back(o);
  priority.push_back(p);
  succ.emplace_back();
  return static_cast<int>(owner.size()) - 1;
}

namespace {

struct Solver {
  const std::vector<int>& owner;
  const std::vector<int>& prio;
  const std::vector<std::vector<int>>& succ;
  std::vector<std::vector<int>> pred;

  // Vertices of `in` from which player i forces a visit to `target`.
  std::vector<char> attractor(const std::vector<char>& in, const std::vector<char>& target, int i) const {
    const std::size_t n = owner.size();
    std::vector<char> attr(n, 0);
    std::vector<int> count(n, 0);
    std::deque<int> todo;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v]) continue;
      if (target[v]) {
        attr[v] = 1;
        todo.push_back(static_cast<int>(v));
      }
      for (int w : succ[v]) count[v] += in[w];
    }
    while (!todo.empty()) {
      int v = todo.front();
      todo.pop_front();
      for (int u : pred[v]) {
        if (!in[u] || attr[u]) continue;
        if (owner[u] == i || --count[u] == 0) {
          attr[u] = 1;
          todo.push_back(u);
        }
      }
    }
    return attr;
  }

  // Returns the winning region of player 0 inside `in`.
  std::vector<char> solve(const std::vector<char>& in) const {
    const std::size_t n = owner.size();
    int pmin = -1;
    for (std::size_t v = 0; v < n; ++v)
      if (in[v] && (pmin < 0 || prio[v] < pmin)) pmin = prio[v];
    std::vector<char> w0(n, 0);
    if (pmin < 0) return w0;
    int i = pmin % 2;
    std::vector<char> target(n, 0);
    for (std::size_t v = 0; v < n; ++v) target[v] = in[v] && prio[v] == pmin;
    std::vector<char> a = attractor(in, target, i);
    std::vector<char> rest(n, 0);
    for (std::size_t v = 0; v < n; ++v) rest[v] = in[v] && !a[v];
    std::vector<char> sub0 = solve(rest);
    std::vector<char> opp(n, 0);  // opponent's region in the subgame
    bool opp_empty = true;
    for (std::size_t v = 0; v < n; ++v) {
      opp[v] = rest[v] && (i == 0 ? !sub0[v] : sub0[v]);
      opp_empty = opp_empty && !opp[v];
    }
    if (opp_empty) {
      for (std::size_t v = 0; v < n; ++v) w0[v] = in[v] && i == 0;
      return w0;
    }
    std::vector<char> b = attractor(in, opp, 1 - i);
    std::vector<char> rest2(n, 0);
    for (std::size_t v = 0; v < n; ++v) rest2[v] = in[v] && !b[v];
    std::vector<char> sub2 = solve(rest2);
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v]) continue;
      w0[v] = b[v] ? (1 - i == 0) : sub2[v];
    }
    return w0;
  }
};

}  // namespace

std::vector<int> ParityGame::solve() const {
  // dead ends lose: route them to a sink won by the other player
  std::vector<int> own = owner, pr = priority;
  std::vector<std::vector<int>> sc = succ;
  const int n = static_cast<int>(own.size());
  int sink[2] = {n, n + 1};  // sink[i] is won by player i
  own.push_back(0);
  pr.push_back(0);
  sc.push_back({sink[0]});
  own.push_back(0);
  pr.push_back(1);
  sc.push_back({sink[1]});
  for (int v = 0; v < n; ++v)
    if (sc[v].empty()) sc[v].push_back(sink[1 - own[v]]);
  Solver s{own, pr, sc, {}};
  s.pred.assign(own.size(), {});
  for (std::size_t v = 0; v < sc.size(); ++v)
    for (int w : sc[v]) s.pred[w].push_back(static_cast<int>(v));
  std::vector<char> all(own.size(), 1);
  std::vector<char> w0 = s.solve(all);
  std::vector<int> out(n);
  for (int v = 0; v < n; ++v) out[v] = w0[v] ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------- acceptance

bool accepts(const Apwa& a, const StreamWord& w, std::size_t start) {
  if (a.initial() < 0) throw PreconditionError("automaton has no initial state");
  if (start >= w.size()) throw PreconditionError("start position outside the word");
  std::vector<int> letters;
  for (const auto& t : w) {
    int x = a.letter(t);
    if (x < 0) throw PreconditionError("tag <" + t.name + "> outside the automaton's alphabet");
    letters.push_back(x);
  }
  int maxc = 0;
  for (int q = 0; q < a.size(); ++q) maxc = std::max(maxc, a.color(q));
  const int neutral = maxc + 2;

  ParityGame g;
  const int win = g.add_vertex(1, neutral);   // player 1 is stuck
  const int lose = g.add_vertex(0, neutral);  // player 0 is stuck
  std::map<std::pair<int, int>, int> state_v, formula_v;
  std::vector<std::pair<int, int>> pending;  // state vertices to expand
  auto state_vertex = [&](int q, long pos) -> int {
    if (pos < 0 || pos >= static_cast<long>(w.size())) return lose;
    auto [it, fresh] = state_v.emplace(std::make_pair(q, static_cast<int>(pos)), 0);
    if (fresh) {
      it->second = g.add_vertex(0, a.color(q));
      pending.push_back({q, static_cast<int>(pos)});
    }
    return it->second;
  };
  using K = Apwa::Formula::Kind;
  std::function<int(int, int)> formula_vertex = [&](int id, int pos) -> int {
    const auto& f = a.formula(id);
    if (f.kind == K::top) return win;
    if (f.kind == K::bot) return lose;
    if (f.kind == K::atom) return state_vertex(f.state, static_cast<long>(pos) + f.dir);
    if (auto it = formula_v.find({id, pos}); it != formula_v.end()) return it->second;
    int v = g.add_vertex(f.kind == K::conj ? 1 : 0, neutral);
    formula_v[{id, pos}] = v;
    int l = formula_vertex(f.lhs, pos), r = formula_vertex(f.rhs, pos);
    g.succ[v] = {l, r};
    return v;
  };
  const int root = state_vertex(a.initial(), static_cast<long>(start));
  while (!pending.empty()) {
    auto [q, pos] = pending.back();
    pending.pop_back();
    int v = state_v.at({q, pos});
    int t = formula_vertex(a.delta(q, letters[pos]), pos);
    g.succ[v] = {t};
  }
  return g.solve()[root] == 0;
}

}  // namespace pfmc
