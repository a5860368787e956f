#include "pfmc/dtd.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>

#include "pfmc/error.hpp"

namespace pfmc {

using boost::multiprecision::cpp_int;

// ---------------------------------------------------------------- Nfa

std::set<std::string> Nfa::alphabet() const {
  std::set<std::string> out;
  for (const auto& e : edges) out.insert(e.letter);
  return out;
}

bool Nfa::accepts(const std::vector<std::string>& word) const {
  std::set<int> cur = initial;
  for (const auto& x : word) {
    std::set<int> next;
    for (const auto& e : edges)
      if (e.letter == x && cur.count(e.from)) next.insert(e.to);
    cur = std::move(next);
    if (cur.empty()) return false;
  }
  return std::any_of(cur.begin(), cur.end(), [&](int s) { return final.count(s) > 0; });
}

namespace {

std::vector<bool> forward_reach(const Nfa& a) {
  std::vector<bool> seen(a.size, false);
  std::deque<int> todo(a.initial.begin(), a.initial.end());
  for (int s : a.initial) seen[s] = true;
  while (!todo.empty()) {
    int s = todo.front();
    todo.pop_front();
    for (const auto& e : a.edges)
      if (e.from == s && !seen[e.to]) {
        seen[e.to] = true;
        todo.push_back(e.to);
      }
  }
  return seen;
}

std::vector<bool> backward_reach(const Nfa& a) {
  std::vector<bool> seen(a.size, false);
  std::deque<int> todo(a.final.begin(), a.final.end());
  for (int s : a.final) seen[s] = true;
  while (!todo.empty()) {
    int s = todo.front();
    todo.pop_front();
    for (const auto& e : a.edges)
      if (e.to == s && !seen[e.from]) {
        seen[e.from] = true;
        todo.push_back(e.from);
      }
  }
  return seen;
}

// Cycle search over a successor function on 0..n-1.
bool graph_has_cycle(int n, const std::function<std::vector<int>(int)>& succ) {
  std::vector<int> color(n, 0);
  std::function<bool(int)> dfs = [&](int u) {
    color[u] = 1;
    for (int v : succ(u)) {
      if (color[v] == 1) return true;
      if (color[v] == 0 && dfs(v)) return true;
    }
    color[u] = 2;
    return false;
  };
  for (int u = 0; u < n; ++u)
    if (color[u] == 0 && dfs(u)) return true;
  return false;
}

}  // namespace

bool Nfa::empty() const {
  auto f = forward_reach(*this);
  return std::none_of(final.begin(), final.end(), [&](int s) { return f[s]; });
}

Nfa Nfa::trimmed() const {
  auto f = forward_reach(*this), b = backward_reach(*this);
  std::vector<int> remap(size, -1);
  Nfa out;
  for (int s = 0; s < size; ++s)
    if (f[s] && b[s]) remap[s] = out.add_state();
  for (const auto& e : edges)
    if (remap[e.from] >= 0 && remap[e.to] >= 0) out.edges.push_back({remap[e.from], e.letter, remap[e.to]});
  for (int s : initial)
    if (remap[s] >= 0) out.initial.insert(remap[s]);
  for (int s : final)
    if (remap[s] >= 0) out.final.insert(remap[s]);
  return out;
}

bool Nfa::infinite() const {
  Nfa t = trimmed();
  std::vector<std::vector<int>> succ(t.size);
  for (const auto& e : t.edges) succ[e.from].push_back(e.to);
  return graph_has_cycle(t.size, [&](int u) { return succ[u]; });
}

std::set<std::string> Nfa::useful_letters() const { return trimmed().alphabet(); }

Nfa Nfa::epsilon() {
  Nfa a;
  int s = a.add_state();
  a.initial.insert(s);
  a.final.insert(s);
  return a;
}

Nfa Nfa::word(const std::vector<std::string>& w) {
  Nfa a;
  int s = a.add_state();
  a.initial.insert(s);
  for (const auto& x : w) {
    int t = a.add_state();
    a.edges.push_back({s, x, t});
    s = t;
  }
  a.final.insert(s);
  return a;
}

namespace {

// Copies b's states into a, returning the offset.
int absorb(Nfa& a, const Nfa& b) {
  int off = a.size;
  a.size += b.size;
  for (const auto& e : b.edges) a.edges.push_back({e.from + off, e.letter, e.to + off});
  return off;
}

}  // namespace

Nfa nfa_union(const Nfa& a, const Nfa& b) {
  Nfa out = a;
  int off = absorb(out, b);
  for (int s : b.initial) out.initial.insert(s + off);
  for (int s : b.final) out.final.insert(s + off);
  return out;
}

Nfa nfa_concat(const Nfa& a, const Nfa& b) {
  Nfa out = a;
  out.final.clear();
  int off = absorb(out, b);
  for (const auto& e : a.edges)
    if (a.final.count(e.to))
      for (int i : b.initial) out.edges.push_back({e.from, e.letter, i + off});
  bool a_nullable = std::any_of(a.initial.begin(), a.initial.end(), [&](int s) { return a.final.count(s) > 0; });
  bool b_nullable = std::any_of(b.initial.begin(), b.initial.end(), [&](int s) { return b.final.count(s) > 0; });
  if (a_nullable)
    for (int i : b.initial) out.initial.insert(i + off);
  for (int s : b.final) out.final.insert(s + off);
  if (b_nullable)
    for (int s : a.final) out.final.insert(s);
  return out;
}

// Regular expression by state elimination. "()" is the empty word.
std::string Nfa::to_regex() const {
  Nfa t = trimmed();
  if (t.size == 0) return "#empty";
  const int src = t.size, dst = t.size + 1;
  std::map<std::pair<int, int>, std::string> r;
  auto alt = [](const std::string& x, const std::string& y) {
    return x == y ? x : "(" + x + " | " + y + ")";
  };
  auto add = [&](int p, int q, const std::string& x) {
    auto it = r.find({p, q});
    if (it == r.end())
      r[{p, q}] = x;
    else
      it->second = alt(it->second, x);
  };
  auto cat = [](const std::string& x, const std::string& y) {
    if (x == "()") return y;
    if (y == "()") return x;
    return x + " " + y;
  };
  for (const auto& e : t.edges) add(e.from, e.to, e.letter);
  for (int s : t.initial) add(src, s, "()");
  for (int s : t.final) add(s, dst, "()");
  for (int k = 0; k < t.size; ++k) {
    std::string loop;
    if (auto it = r.find({k, k}); it != r.end()) {
      loop = it->second.find(' ') == std::string::npos ? it->second + "*" : "(" + it->second + ")*";
      r.erase(it);
    }
    std::vector<std::pair<int, std::string>> in, out;
    for (const auto& [pq, x] : r) {
      if (pq.second == k) in.push_back({pq.first, x});
      if (pq.first == k) out.push_back({pq.second, x});
    }
    for (auto it = r.begin(); it != r.end();)
      it = it->first.first == k || it->first.second == k ? r.erase(it) : std::next(it);
    for (const auto& [p, x] : in)
      for (const auto& [q, y] : out) add(p, q, cat(cat(x, loop.empty() ? "()" : loop), y));
  }
  auto it = r.find({src, dst});
  return it == r.end() ? "#empty" : it->second;
}

// ---------------------------------------------------------------- Dtd

const Nfa& Dtd::content_of(const std::string& x) const {
  auto it = content.find(x);
  if (it == content.end()) throw PreconditionError("DTD has no symbol '" + x + "'");
  return it->second;
}

std::map<std::string, std::set<std::string>> Dtd::reach_graph() const {
  std::map<std::string, std::set<std::string>> g;
  for (const auto& [x, a] : content) g[x] = a.useful_letters();
  return g;
}

bool Dtd::accepts(const Tree& t) const {
  auto it = content.find(t.label);
  if (it == content.end()) return false;
  std::vector<std::string> word;
  for (const auto& c : t.children) word.push_back(c.label);
  if (!it->second.accepts(word)) return false;
  return std::all_of(t.children.begin(), t.children.end(), [&](const Tree& c) { return accepts(c); });
}

std::string Dtd::dump() const {
  std::string out = "start " + start + "\n";
  for (const auto& [x, a] : content) out += x + " -> " + a.to_regex() + "\n";
  return out;
}

namespace {

// Symbols indexed for cycle search over the reachability graph.
bool symbol_graph_cycle(const std::map<std::string, std::set<std::string>>& g,
                        const std::set<std::string>& keep) {
  std::vector<std::string> names(keep.begin(), keep.end());
  std::map<std::string, int> idx;
  for (std::size_t k = 0; k < names.size(); ++k) idx[names[k]] = static_cast<int>(k);
  return graph_has_cycle(static_cast<int>(names.size()), [&](int u) {
    std::vector<int> out;
    auto it = g.find(names[u]);
    if (it != g.end())
      for (const auto& y : it->second)
        if (idx.count(y)) out.push_back(idx[y]);
    return out;
  });
}

std::set<std::string> all_symbols(const Dtd& d) {
  std::set<std::string> out;
  for (const auto& [x, a] : d.content) out.insert(x);
  return out;
}

// Content models restricted to productive letters, plus the productive set.
struct Restricted {
  std::set<std::string> productive;
  std::map<std::string, Nfa> content;
  std::set<std::string> reachable;
};

Nfa restrict_letters(const Nfa& a, const std::set<std::string>& allowed) {
  Nfa r = a;
  r.edges.clear();
  for (const auto& e : a.edges)
    if (allowed.count(e.letter)) r.edges.push_back(e);
  return r.trimmed();
}

Restricted restrict(const Dtd& d) {
  Restricted out;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [x, a] : d.content)
      if (!out.productive.count(x) && !restrict_letters(a, out.productive).empty()) {
        out.productive.insert(x);
        changed = true;
      }
  }
  for (const auto& x : out.productive) out.content[x] = restrict_letters(d.content.at(x), out.productive);
  if (!out.productive.count(d.start)) return out;
  std::deque<std::string> todo{d.start};
  out.reachable.insert(d.start);
  while (!todo.empty()) {
    std::string x = todo.front();
    todo.pop_front();
    for (const auto& y : out.content[x].alphabet())
      if (out.reachable.insert(y).second) todo.push_back(y);
  }
  return out;
}

// Longest-path style fold over the (acyclic) trimmed NFA: value of a path
// is combine(letter values), alternatives are merged with `merge`.
template <class T>
T fold_paths(const Nfa& a, const std::function<T(const std::string&)>& letter, T unit,
             const std::function<T(const T&, const T&)>& combine,
             const std::function<T(const T&, const T&)>& merge, T zero) {
  std::vector<std::optional<T>> memo(a.size);
  std::function<T(int)> from = [&](int s) {
    if (memo[s]) return *memo[s];
    T v = a.final.count(s) ? unit : zero;
    for (const auto& e : a.edges)
      if (e.from == s) v = merge(v, combine(letter(e.letter), from(e.to)));
    memo[s] = v;
    return v;
  };
  T total = zero;
  for (int s : a.initial) total = merge(total, from(s));
  return total;
}

}  // namespace

bool is_nonrecursive(const Dtd& d) { return !symbol_graph_cycle(d.reach_graph(), all_symbols(d)); }

std::size_t max_depth(const Dtd& d) {
  if (!is_nonrecursive(d)) throw PreconditionError("max_depth needs a non-recursive DTD");
  auto g = d.reach_graph();
  std::map<std::string, std::size_t> memo;
  std::function<std::size_t(const std::string&)> depth = [&](const std::string& x) -> std::size_t {
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::size_t best = 0;
    for (const auto& y : g[x]) best = std::max(best, depth(y));
    return memo[x] = best + 1;
  };
  return depth(d.start);
}

TreeCount count_dtd_trees(const Dtd& d) {
  TreeCount out;
  Restricted r = restrict(d);
  if (r.reachable.empty()) return out;
  std::map<std::string, std::set<std::string>> g;
  for (const auto& x : r.reachable) {
    if (r.content[x].infinite()) {
      out.infinite = true;
      return out;
    }
    g[x] = r.content[x].alphabet();
  }
  if (symbol_graph_cycle(g, r.reachable)) {
    out.infinite = true;
    return out;
  }
  std::map<std::string, cpp_int> memo;
  std::function<cpp_int(const std::string&)> count = [&](const std::string& x) -> cpp_int {
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    cpp_int v = fold_paths<cpp_int>(
        r.content[x], count, cpp_int(1), [](const cpp_int& a, const cpp_int& b) { return a * b; },
        [](const cpp_int& a, const cpp_int& b) { return a + b; }, cpp_int(0));
    return memo[x] = v;
  };
  out.value = count(d.start);
  return out;
}

std::vector<Tree> enumerate_dtd_trees(const Dtd& d, std::size_t budget, bool* truncated) {
  if (truncated) *truncated = false;
  std::vector<Tree> out;
  TreeCount total = count_dtd_trees(d);
  if (!total.infinite && total.value == 0) return out;
  Restricted r = restrict(d);

  // Largest tree size when finite.
  std::size_t max_size = 0;
  if (!total.infinite) {
    std::map<std::string, std::size_t> memo;
    std::function<std::size_t(const std::string&)> biggest = [&](const std::string& x) -> std::size_t {
      if (auto it = memo.find(x); it != memo.end()) return it->second;
      std::size_t v = fold_paths<std::size_t>(
          r.content[x], biggest, 0, [](std::size_t a, std::size_t b) { return a + b; },
          [](std::size_t a, std::size_t b) { return std::max(a, b); }, 0);
      return memo[x] = v + 1;
    };
    max_size = biggest(d.start);
  }

  std::map<std::pair<std::string, std::size_t>, std::vector<Tree>> trees_memo;
  std::map<std::tuple<std::string, int, std::size_t>, std::vector<std::vector<Tree>>> seq_memo;
  std::function<const std::vector<Tree>&(const std::string&, std::size_t)> trees_of;
  std::function<const std::vector<std::vector<Tree>>&(const std::string&, int, std::size_t)> seqs;

  seqs = [&](const std::string& x, int s, std::size_t rem) -> const std::vector<std::vector<Tree>>& {
    auto key = std::make_tuple(x, s, rem);
    if (auto it = seq_memo.find(key); it != seq_memo.end()) return it->second;
    std::vector<std::vector<Tree>> res;
    const Nfa& a = r.content[x];
    if (rem == 0) {
      if (a.final.count(s)) res.push_back({});
    } else {
      for (const auto& e : a.edges) {
        if (e.from != s) continue;
        for (std::size_t k = 1; k <= rem; ++k) {
          const auto& heads = trees_of(e.letter, k);
          if (heads.empty()) continue;
          const auto& tails = seqs(x, e.to, rem - k);
          for (const auto& h : heads)
            for (const auto& tail : tails) {
              std::vector<Tree> v{h};
              v.insert(v.end(), tail.begin(), tail.end());
              res.push_back(std::move(v));
            }
        }
      }
    }
    return seq_memo[key] = std::move(res);
  };

  trees_of = [&](const std::string& x, std::size_t size) -> const std::vector<Tree>& {
    auto key = std::make_pair(x, size);
    if (auto it = trees_memo.find(key); it != trees_memo.end()) return it->second;
    std::set<Tree> res;
    if (size >= 1 && r.productive.count(x))
      for (int s : r.content[x].initial)
        for (const auto& kids : seqs(x, s, size - 1)) res.insert(Tree{x, kids});
    return trees_memo[key] = std::vector<Tree>(res.begin(), res.end());
  };

  for (std::size_t size = 1; total.infinite || size <= max_size; ++size) {
    for (const Tree& t : trees_of(d.start, size)) {
      if (out.size() == budget) {
        if (truncated) *truncated = true;
        return out;
      }
      out.push_back(t);
    }
  }
  return out;
}

// ---------------------------------------------------------------- reductions

pdl::NodeFormula DtdReduction::transform(const pdl::NodeFormula& f) const {
  pdl::NodeFormula g = pdl::substitute(f, subst);
  return virtual_root ? pdl::diamond(pdl::firstchild_macro(), g) : g;
}

namespace {

std::vector<std::vector<int>> unit_successors(const ForestAutomaton& a) {
  std::vector<std::vector<int>> out(a.states.size());
  for (const auto& r : a.rules)
    if (r.children.size() == 1) out[r.lhs].push_back(r.children[0]);
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

}  // namespace

std::map<std::string, pdl::NodeFormula> state_interpretation(const ForestAutomaton& a, const Cfg& g,
                                                             bool barred) {
  auto units = unit_successors(a);
  std::map<std::string, std::vector<pdl::NodeFormula>> parts;
  for (const auto& p : g.propositions()) parts[p];
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const ForestState& q = a.states[k];
    for (const auto& p : g.features_of(q.x)) {
      parts[p].push_back(pdl::atom(q.name()));
      if (barred && !units[k].empty()) parts[p].push_back(pdl::atom(q.barred_name()));
    }
  }
  std::map<std::string, pdl::NodeFormula> out;
  for (const auto& [p, fs] : parts) out[p] = pdl::disj_all(fs);
  return out;
}

pdl::NodeFormula relabel_formula(const pdl::NodeFormula& f,
                                 const std::map<std::string, pdl::NodeFormula>& interp) {
  pdl::Substitution s;
  s.atoms = interp;
  s.require_total = true;
  return pdl::substitute(f, s);
}

namespace {

Dtd empty_dtd() {
  Dtd d;
  d.start = "none";
  d.content["none"] = Nfa{};
  return d;
}

}  // namespace

DtdReduction dtd_from_acyclic(const ForestAutomaton& a, const Cfg& g) {
  if (a.flavor != ForestFlavor::localized) throw PreconditionError("expected a localized forest automaton");
  if (a.has_cycle()) throw PreconditionError("forest automaton is recursive; the grammar is cyclic");
  DtdReduction out;
  out.subst.atoms = state_interpretation(a, g, false);
  out.subst.require_total = true;
  if (a.empty()) {
    out.dtd = empty_dtd();
    return out;
  }
  out.dtd.start = a.states[a.initial].name();
  for (const auto& q : a.states) out.dtd.content[q.name()] = Nfa{};
  std::map<std::string, std::set<std::vector<std::string>>> words;
  for (const auto& r : a.rules) {
    std::vector<std::string> w;
    for (int c : r.children) w.push_back(a.states[c].name());
    words[a.states[r.lhs].name()].insert(w);
  }
  for (const auto& [x, ws] : words)
    for (const auto& w : ws) out.dtd.content[x] = nfa_union(out.dtd.content[x], Nfa::word(w));
  return out;
}

Nfa chains_nfa(const ForestAutomaton& a, int q) {
  if (q < 0 || q >= static_cast<int>(a.states.size())) throw PreconditionError("chains_nfa: no such state");
  auto units = unit_successors(a);
  std::vector<bool> ends(a.states.size(), false);
  for (const auto& r : a.rules) {
    if (r.children.size() > 2) throw PreconditionError("chains_nfa: rule with more than two children");
    if (r.children.size() != 1) ends[r.lhs] = true;
  }
  Nfa out;
  std::map<int, int> bar_id, plain_id;
  auto bar = [&](int p) {
    auto [it, fresh] = bar_id.try_emplace(p, 0);
    if (fresh) it->second = out.add_state();
    return it->second;
  };
  out.initial.insert(bar(q));
  std::deque<int> todo{q};
  std::set<int> seen{q};
  while (!todo.empty()) {
    int p = todo.front();
    todo.pop_front();
    for (int p2 : units[p]) {
      out.edges.push_back({bar(p), a.states[p].barred_name(), bar(p2)});
      if (seen.insert(p2).second) todo.push_back(p2);
    }
    if (ends[p]) {
      int t = out.add_state();
      plain_id[p] = t;
      out.final.insert(t);
      out.edges.push_back({bar(p), a.states[p].name(), t});
    }
  }
  return out;
}

pdl::PathFormula rotated_down(const std::vector<std::string>& barred, bool virtual_root) {
  using namespace pdl;
  std::vector<NodeFormula> bars;
  for (const auto& b : barred) bars.push_back(atom(b));
  NodeFormula bar = disj_all(bars);
  NodeFormula guard = virtual_root ? conj(neg(bar), neg(atom(kVirtualRoot))) : neg(bar);
  return choice(seq_all({test(guard), down(), test(box(left(), neg(bar)))}), seq(test(bar), right()));
}

pdl::PathFormula rotated_right(const std::vector<std::string>& barred) {
  using namespace pdl;
  std::vector<NodeFormula> bars;
  for (const auto& b : barred) bars.push_back(atom(b));
  NodeFormula bar = disj_all(bars);
  return seq_all({test(box(left(), neg(bar))), star(seq(test(bar), right())), test(neg(bar)), right()});
}

DtdReduction rotate_epsfree(const ForestAutomaton& a, const Cfg& g) {
  if (a.flavor == ForestFlavor::plain) throw PreconditionError("expected a trimmed forest automaton");
  for (const auto& q : a.states)
    if (q.x == kEpsilon) throw PreconditionError("rotation needs an epsilon-free grammar");
  for (const auto& r : a.rules)
    if (r.children.size() > 2) throw PreconditionError("rotation needs right-hand sides of length at most 2");

  DtdReduction out;
  if (a.empty()) {
    out.dtd = empty_dtd();
    out.subst.atoms = state_interpretation(a, g, true);
    out.subst.require_total = true;
    return out;
  }
  auto units = unit_successors(a);
  std::vector<std::string> barred;
  std::vector<Nfa> chains(a.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    chains[k] = chains_nfa(a, static_cast<int>(k)).trimmed();
    if (!units[k].empty()) {
      barred.push_back(a.states[k].barred_name());
      out.dtd.content[a.states[k].barred_name()] = Nfa::epsilon();
    }
  }
  for (const auto& q : a.states) out.dtd.content[q.name()] = Nfa{};
  std::set<std::pair<int, std::vector<int>>> seen;
  for (const auto& r : a.rules) {
    if (r.children.size() == 1 || !seen.insert({r.lhs, r.children}).second) continue;
    Nfa& c = out.dtd.content[a.states[r.lhs].name()];
    if (r.children.empty())
      c = nfa_union(c, Nfa::epsilon());
    else
      c = nfa_union(c, nfa_concat(chains[r.children[0]], chains[r.children[1]]));
  }
  out.virtual_root = !units[a.initial].empty();
  if (out.virtual_root) {
    out.dtd.start = kVirtualRoot;
    out.dtd.content[kVirtualRoot] = chains[a.initial];
  } else {
    out.dtd.start = a.states[a.initial].name();
  }
  out.subst.atoms = state_interpretation(a, g, true);
  out.subst.require_total = true;
  out.subst.down = rotated_down(barred, out.virtual_root);
  out.subst.right = rotated_right(barred);
  return out;
}

namespace {

void check_annotated(const Tree& t) {
  if (!parse_state_name(t.label)) throw PreconditionError("rotate_tree: label '" + t.label + "' is not a state");
  for (const auto& c : t.children) check_annotated(c);
}

Tree rotate_node(const Tree& t);

// Appends the chain starting at t: barred copies of its unit nodes, then
// the rotated chain end.
void append_chain(const Tree& t, std::vector<Tree>& out) {
  const Tree* cur = &t;
  while (cur->children.size() == 1) {
    out.push_back(Tree{parse_state_name(cur->label)->barred_name(), {}});
    cur = &cur->children[0];
  }
  out.push_back(rotate_node(*cur));
}

Tree rotate_node(const Tree& t) {
  Tree out{t.label, {}};
  for (const auto& c : t.children) append_chain(c, out.children);
  return out;
}

// Children of a rotated node: each barred run followed by a plain node
// becomes one nested chain.
std::vector<Tree> fold_chains(const std::vector<Tree>& kids) {
  std::vector<Tree> out;
  std::vector<std::string> bars;
  for (const auto& k : kids) {
    bool barred = false;
    auto q = parse_state_name(k.label, &barred);
    if (!q) throw PreconditionError("unrotate_tree: label '" + k.label + "' is not a state");
    if (barred) {
      if (!k.is_leaf()) throw PreconditionError("unrotate_tree: barred node with children");
      bars.push_back(q->name());
      continue;
    }
    Tree chain{k.label, fold_chains(k.children)};
    for (auto it = bars.rbegin(); it != bars.rend(); ++it) chain = Tree{*it, {std::move(chain)}};
    out.push_back(std::move(chain));
    bars.clear();
  }
  if (!bars.empty()) throw PreconditionError("unrotate_tree: chain without a plain end");
  return out;
}

}  // namespace

Tree unrotate_tree(const Tree& rotated, bool virtual_root) {
  if (!virtual_root) return Tree{rotated.label, fold_chains(rotated.children)};
  if (rotated.label != kVirtualRoot) throw PreconditionError("unrotate_tree: expected the virtual root");
  std::vector<Tree> top = fold_chains(rotated.children);
  if (top.size() != 1) throw PreconditionError("unrotate_tree: the virtual root must hold one chain");
  return top.front();
}

Tree rotate_tree(const Tree& run, bool virtual_root) {
  check_annotated(run);
  if (virtual_root) {
    Tree top{kVirtualRoot, {}};
    append_chain(run, top.children);
    return top;
  }
  if (run.children.size() == 1) throw PreconditionError("rotate_tree: unit rule at the root needs a virtual root");
  return rotate_node(run);
}

}  // namespace pfmc
