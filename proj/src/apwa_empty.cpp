// Emptiness by a forward search over prefix summaries.
//
// Cut the word after position i. The prefix is summarized by
//   S    the value of the initial configuration, and
//   L[p] the value of entering position i from the right in state p,
// each as a monotone boolean function of exit variables e(q, r): "the play
// leaves the prefix to the right, in state q, and the least color met since
// it entered the prefix has rank r". Extending the prefix by one letter
// solves the parity game on the new position, where moves to the left go
// through the old L and plays that come back are charged with their rank.
// Summaries are canonical decision diagrams, so the search is finite.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "bdd.hpp"
#include "pfmc/apwa.hpp"
#include "pfmc/error.hpp"

namespace pfmc {

namespace {

using detail::Bdd;
using K = Apwa::Formula::Kind;

struct Summary {
  int start = Bdd::kFalse;
  std::vector<int> left;  // indexed like Engine::entries_

  std::vector<int> key() const {
    std::vector<int> k{start};
    k.insert(k.end(), left.begin(), left.end());
    return k;
  }
};

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = v.size();
    for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x);
    return h;
  }
};

class Engine {
 public:
  explicit Engine(const Apwa& a) : a_(a) {
    std::set<int> colors;
    for (int q = 0; q < a.size(); ++q) colors.insert(a.color(q));
    palette_.assign(colors.begin(), colors.end());
    for (std::size_t r = 0; r < palette_.size(); ++r) rank_[palette_[r]] = static_cast<int>(r);
    ranks_ = std::max<int>(1, static_cast<int>(palette_.size()));
    color_rank_.resize(a.size());
    for (int q = 0; q < a.size(); ++q) color_rank_[q] = rank_.at(a.color(q));
    entry_index_.assign(a.size(), -1);
    for (std::size_t id = 0; id < a.formula_count(); ++id) {
      const auto& f = a.formula(static_cast<int>(id));
      if (f.kind == K::atom && f.dir < 0 && entry_index_[f.state] < 0) {
        entry_index_[f.state] = static_cast<int>(entries_.size());
        entries_.push_back(f.state);
      }
    }
    x_stamp_.assign(a.size(), 0);
    x_of_.assign(a.size(), -1);
    y_stamp_.assign(static_cast<std::size_t>(a.size()) * ranks_, 0);
    y_of_.assign(y_stamp_.size(), -1);
  }

  Summary step(const Summary* prev, int letter, bool last);

 private:
  struct Vertex {
    int q;
    int rank;  // -1 for a state vertex, else the charge of a return
    int color;
  };

  int exit_var(int q, int r) const { return q * ranks_ + r; }

  // Lowers every exit rank above r to r.
  int cap(int f, int r) {
    if (f <= Bdd::kTrue || r == ranks_ - 1) return f;
    std::uint64_t key = static_cast<std::uint64_t>(f) * 64 + static_cast<std::uint64_t>(r);
    if (auto it = cap_cache_.find(key); it != cap_cache_.end()) return it->second;
    int out = bdd_.compose(f, [&](int v) {
      int q = v / ranks_, rv = v % ranks_;
      return bdd_.var(exit_var(q, std::min(rv, r)));
    });
    cap_cache_.emplace(key, out);
    return out;
  }

  const std::vector<int>& support(int f) {
    auto it = support_cache_.find(f);
    if (it == support_cache_.end()) it = support_cache_.emplace(f, bdd_.support(f)).first;
    return it->second;
  }

  int need_x(int q);
  int need_y(int var);
  void discover();
  void order_components();
  int eval_formula(int id);
  int eval(int v);
  void solve_levels(std::size_t k);

  const Apwa& a_;
  Bdd bdd_;
  std::vector<int> palette_;
  std::map<int, int> rank_;
  std::vector<int> color_rank_;
  int ranks_ = 1;
  std::vector<int> entries_;      // states entered by leftward moves
  std::vector<int> entry_index_;  // state -> position in entries_, or -1
  std::unordered_map<std::uint64_t, int> cap_cache_;
  std::unordered_map<int, std::vector<int>> support_cache_;

  // per-step scratch, reused across steps
  const Summary* prev_ = nullptr;
  int letter_ = 0;
  bool last_ = false;
  unsigned epoch_ = 0;
  std::vector<unsigned> x_stamp_, y_stamp_;
  std::vector<int> x_of_, y_of_;  // state / exit variable -> vertex
  std::vector<Vertex> verts_;
  std::vector<int> todo_;
  std::vector<int> dep_begin_, dep_end_, deps_;
  std::vector<int> val_;
  std::vector<int> index_, low_, tarjan_stack_, comp_order_, comp_begin_;
  std::vector<char> on_stack_;
  std::vector<std::pair<int, int>> call_;
  std::vector<int> formula_stack_;
  std::vector<std::vector<int>> levels_;
  std::vector<int> level_color_;
};

int Engine::need_x(int q) {
  if (x_stamp_[q] == epoch_) return x_of_[q];
  x_stamp_[q] = epoch_;
  int v = static_cast<int>(verts_.size());
  x_of_[q] = v;
  verts_.push_back({q, -1, a_.color(q)});
  todo_.push_back(v);
  return v;
}

int Engine::need_y(int var) {
  if (y_stamp_[var] == epoch_) return y_of_[var];
  y_stamp_[var] = epoch_;
  int v = static_cast<int>(verts_.size());
  y_of_[var] = v;
  int r = var % ranks_;
  verts_.push_back({var / ranks_, r, palette_.empty() ? 0 : palette_[r]});
  todo_.push_back(v);
  return v;
}

// Every vertex reachable from the summary and the entry states, with the
// vertices each one reads stored as ranges of deps_.
void Engine::discover() {
  verts_.clear();
  todo_.clear();
  deps_.clear();
  if (prev_)
    for (int v : support(prev_->start)) need_y(v);
  else
    need_x(a_.initial());
  if (!last_)
    for (int p : entries_) need_x(p);
  while (!todo_.empty()) {
    int v = todo_.back();
    todo_.pop_back();
    int begin = static_cast<int>(deps_.size());
    if (verts_[v].rank >= 0) {
      int x = need_x(verts_[v].q);
      deps_.push_back(x);
    } else {
      formula_stack_.assign(1, a_.delta(verts_[v].q, letter_));
      while (!formula_stack_.empty()) {
        const auto& f = a_.formula(formula_stack_.back());
        formula_stack_.pop_back();
        if (f.kind == K::conj || f.kind == K::disj) {
          formula_stack_.push_back(f.lhs);
          formula_stack_.push_back(f.rhs);
        } else if (f.kind == K::atom && f.dir == 0) {
          int x = need_x(f.state);
          deps_.push_back(x);
        } else if (f.kind == K::atom && f.dir < 0 && prev_) {
          for (int var : support(prev_->left[entry_index_[f.state]])) {
            int y = need_y(var);
            deps_.push_back(y);
          }
        }
      }
    }
    if (dep_begin_.size() < verts_.size()) {
      dep_begin_.resize(verts_.size() * 2);
      dep_end_.resize(verts_.size() * 2);
    }
    dep_begin_[v] = begin;
    dep_end_[v] = static_cast<int>(deps_.size());
  }
}

// Strongly connected components, each listed after every component it
// reads (Tarjan, iterative).
void Engine::order_components() {
  const int n = static_cast<int>(verts_.size());
  index_.assign(n, -1);
  low_.assign(n, 0);
  on_stack_.assign(n, 0);
  tarjan_stack_.clear();
  comp_order_.clear();
  comp_begin_.clear();
  int counter = 0;
  auto enter = [&](int v) {
    index_[v] = low_[v] = counter++;
    tarjan_stack_.push_back(v);
    on_stack_[v] = 1;
    call_.push_back({v, dep_begin_[v]});
  };
  for (int root = 0; root < n; ++root) {
    if (index_[root] >= 0) continue;
    call_.clear();
    enter(root);
    while (!call_.empty()) {
      auto [v, next] = call_.back();
      if (next < dep_end_[v]) {
        ++call_.back().second;
        int w = deps_[next];
        if (index_[w] < 0)
          enter(w);
        else if (on_stack_[w])
          low_[v] = std::min(low_[v], index_[w]);
        continue;
      }
      if (low_[v] == index_[v]) {
        comp_begin_.push_back(static_cast<int>(comp_order_.size()));
        int w;
        do {
          w = tarjan_stack_.back();
          tarjan_stack_.pop_back();
          on_stack_[w] = 0;
          comp_order_.push_back(w);
        } while (w != v);
      }
      call_.pop_back();
      if (!call_.empty()) low_[call_.back().first] = std::min(low_[call_.back().first], low_[v]);
    }
  }
  comp_begin_.push_back(static_cast<int>(comp_order_.size()));
}

int Engine::eval_formula(int id) {
  const auto& f = a_.formula(id);
  switch (f.kind) {
    case K::top: return Bdd::kTrue;
    case K::bot: return Bdd::kFalse;
    case K::conj: {
      int l = eval_formula(f.lhs);
      return l == Bdd::kFalse ? l : bdd_.land(l, eval_formula(f.rhs));
    }
    case K::disj: {
      int l = eval_formula(f.lhs);
      return l == Bdd::kTrue ? l : bdd_.lor(l, eval_formula(f.rhs));
    }
    case K::atom:
      if (f.dir == 0) return val_[x_of_[f.state]];
      if (f.dir > 0) return last_ ? Bdd::kFalse : bdd_.var(exit_var(f.state, ranks_ - 1));
      if (!prev_) return Bdd::kFalse;
      return bdd_.compose(prev_->left[entry_index_[f.state]], [&](int var) { return val_[y_of_[var]]; });
  }
  return Bdd::kFalse;
}

int Engine::eval(int v) {
  const Vertex& x = verts_[v];
  if (x.rank >= 0) return cap(val_[x_of_[x.q]], x.rank);
  return cap(eval_formula(a_.delta(x.q, letter_)), color_rank_[x.q]);
}

// Nested fixpoints over one component, least color outermost.
void Engine::solve_levels(std::size_t k) {
  if (k == levels_.size()) return;
  int init = level_color_[k] % 2 == 0 ? Bdd::kTrue : Bdd::kFalse;
  for (int i : levels_[k]) val_[i] = init;
  for (bool changed = true; changed;) {
    solve_levels(k + 1);
    changed = false;
    for (int i : levels_[k]) {
      int nv = eval(i);
      if (nv != val_[i]) {
        val_[i] = nv;
        changed = true;
      }
    }
  }
}

Summary Engine::step(const Summary* prev, int letter, bool last) {
  prev_ = prev;
  letter_ = letter;
  last_ = last;
  ++epoch_;
  discover();
  order_components();
  val_.assign(verts_.size(), Bdd::kFalse);

  for (std::size_t c = 0; c + 1 < comp_begin_.size(); ++c) {
    int b = comp_begin_[c], e = comp_begin_[c + 1];
    int v0 = comp_order_[b];
    auto db = deps_.begin() + dep_begin_[v0], de = deps_.begin() + dep_end_[v0];
    if (e - b == 1 && std::find(db, de, v0) == de) {
      val_[v0] = eval(v0);
      continue;
    }
    std::map<int, std::vector<int>> groups;
    for (int i = b; i < e; ++i) groups[verts_[comp_order_[i]].color].push_back(comp_order_[i]);
    levels_.clear();
    level_color_.clear();
    for (auto& [color, members] : groups) {
      level_color_.push_back(color);
      levels_.push_back(std::move(members));
    }
    solve_levels(0);
  }

  Summary out;
  out.start = prev ? bdd_.compose(prev->start, [&](int var) { return val_[y_of_[var]]; })
                   : val_[x_of_[a_.initial()]];
  out.left.assign(entries_.size(), Bdd::kFalse);
  if (!last)
    for (std::size_t i = 0; i < entries_.size(); ++i) out.left[i] = val_[x_of_[entries_[i]]];
  if (bdd_.cache_size() > (1u << 22)) bdd_.clear_caches();
  return out;
}

// Deterministic tracker of the open elements of a DTD encoding. A position
// is [done, (symbol, #states, states...)*] with one frame per open element.
class Guide {
 public:
  Guide(const Apwa& a, const Dtd* d) : active_(d != nullptr) {
    if (!d) return;
    const auto& syms = a.symbols();
    std::map<std::string, int> id;
    for (std::size_t k = 0; k < syms.size(); ++k) id[syms[k]] = static_cast<int>(k);
    content_.resize(syms.size());
    start_ = id.count(d->start) ? id.at(d->start) : -1;
    for (std::size_t k = 0; k < syms.size(); ++k) {
      if (!d->has_symbol(syms[k])) continue;
      Nfa m = d->content_of(syms[k]).trimmed();
      Content& c = content_[k];
      c.known = true;
      c.step.resize(m.size);
      for (const auto& e : m.edges)
        if (id.count(e.letter)) c.step[e.from].push_back({id.at(e.letter), e.to});
      c.initial.assign(m.initial.begin(), m.initial.end());
      c.final.assign(m.final.begin(), m.final.end());
    }
  }

  std::vector<int> start() const { return {0}; }

  /// Position after `letter`, or nothing if no encoding continues that way.
  std::optional<std::vector<int>> next(const std::vector<int>& pos, int letter) const {
    if (!active_) return pos;
    bool done = pos[0] != 0;
    std::size_t top = pos.size();  // offset of the innermost frame
    for (std::size_t i = 1; i < pos.size(); i += 2 + pos[i + 1]) top = i;
    bool empty = top == pos.size();
    if (letter == 1) return done && empty ? std::optional(pos) : std::nullopt;
    int k = Apwa::symbol_of(letter);
    if (k >= static_cast<int>(content_.size()) || !content_[k].known) return std::nullopt;
    if (!Apwa::is_open(letter)) {
      if (empty || pos[top] != k) return std::nullopt;
      const auto& fin = content_[k].final;
      bool accepting = std::any_of(pos.begin() + top + 2, pos.end(),
                                   [&](int s) { return std::binary_search(fin.begin(), fin.end(), s); });
      if (!accepting) return std::nullopt;
      std::vector<int> out(pos.begin(), pos.begin() + top);
      if (out.size() == 1) out[0] = 1;
      return out;
    }
    std::vector<int> out;
    if (empty) {
      if (done || k != start_) return std::nullopt;
      out = pos;
    } else {
      std::set<int> moved;
      const Content& parent = content_[pos[top]];
      for (auto it = pos.begin() + top + 2; it != pos.end(); ++it)
        for (auto [sym, to] : parent.step[*it])
          if (sym == k) moved.insert(to);
      if (moved.empty()) return std::nullopt;
      out.assign(pos.begin(), pos.begin() + top + 1);
      out.push_back(static_cast<int>(moved.size()));
      out.insert(out.end(), moved.begin(), moved.end());
    }
    out.push_back(k);
    out.push_back(static_cast<int>(content_[k].initial.size()));
    out.insert(out.end(), content_[k].initial.begin(), content_[k].initial.end());
    return out;
  }

 private:
  struct Content {
    bool known = false;
    std::vector<std::vector<std::pair<int, int>>> step;  // state -> (symbol, target)
    std::vector<int> initial, final;
  };
  bool active_;
  int start_ = -1;
  std::vector<Content> content_;
};

EmptinessResult search(const Apwa& a, const Dtd* d, std::size_t max_summaries) {
  if (a.initial() < 0) throw PreconditionError("automaton has no initial state");
  Engine eng(a);
  Guide guide(a, d);
  EmptinessResult res;

  struct Node {
    Summary summary;
    std::vector<int> pos;
    int parent;
    int via;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::vector<int>, int, VecHash> index;
  auto witness = [&](int id) {
    StreamWord w{a.tag(1)};
    for (int s = id; s > 0; s = nodes[s].parent) w.push_back(a.tag(nodes[s].via));
    w.push_back(a.tag(0));
    std::reverse(w.begin(), w.end());
    return w;
  };
  auto key = [](const Node& n) {
    std::vector<int> k = n.summary.key();
    k.push_back(-1);
    k.insert(k.end(), n.pos.begin(), n.pos.end());
    return k;
  };

  Summary first = eng.step(nullptr, 0, false);
  if (first.start == Bdd::kFalse) return res;
  nodes.push_back({first, guide.start(), -1, 0});
  index.emplace(key(nodes[0]), 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    Summary cur = nodes[id].summary;
    std::vector<int> pos = nodes[id].pos;
    if (guide.next(pos, 1) && eng.step(&cur, 1, true).start == Bdd::kTrue) {
      res.empty = false;
      res.witness = witness(id);
      break;
    }
    for (int x = a.letters() - 1; x >= 2; --x) {
      auto npos = guide.next(pos, x);
      if (!npos) continue;
      Summary nxt = eng.step(&cur, x, false);
      if (nxt.start == Bdd::kFalse) continue;
      Node node{std::move(nxt), std::move(*npos), id, x};
      auto [it, fresh] = index.emplace(key(node), static_cast<int>(nodes.size()));
      if (!fresh) continue;
      nodes.push_back(std::move(node));
      stack.push_back(it->second);
      if (max_summaries && nodes.size() > max_summaries)
        throw Error("emptiness search exceeded " + std::to_string(max_summaries) + " summaries");
    }
  }
  res.summaries = nodes.size();
  return res;
}

}  // namespace

EmptinessResult check_emptiness(const Apwa& a, std::size_t max_summaries) {
  return search(a, nullptr, max_summaries);
}

EmptinessResult check_emptiness(const Apwa& a, const Dtd& guide, std::size_t max_summaries) {
  return search(a, &guide, max_summaries);
}

bool is_empty(const Apwa& a) { return check_emptiness(a).empty; }

}  // namespace pfmc
