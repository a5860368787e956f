#include "pfmc/forest.hpp"

#include <algorithm>
#include <functional>

#include "pfmc/error.hpp"

namespace pfmc {

std::string ForestState::name() const {
  return std::to_string(i) + "_" + x + "_" + std::to_string(j);
}

std::string ForestState::barred_name() const { return "bar_" + name(); }

std::optional<ForestState> parse_state_name(const std::string& s, bool* barred) {
  std::string body = s;
  bool bar = body.rfind("bar_", 0) == 0;
  if (bar) body = body.substr(4);
  auto first = body.find('_');
  auto last = body.rfind('_');
  if (first == std::string::npos || first == last || first == 0 || last + 1 >= body.size())
    return std::nullopt;
  auto digits = [](const std::string& d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string a = body.substr(0, first), b = body.substr(last + 1);
  if (!digits(a) || !digits(b)) return std::nullopt;
  if (barred) *barred = bar;
  return ForestState{std::stoi(a), body.substr(first + 1, last - first - 1), std::stoi(b)};
}

int ForestAutomaton::find(const ForestState& q) const {
  auto it = index_.find(q);
  return it == index_.end() ? -1 : it->second;
}

int ForestAutomaton::add_state(const ForestState& q) {
  auto [it, inserted] = index_.emplace(q, static_cast<int>(states.size()));
  if (inserted) states.push_back(q);
  return it->second;
}

std::vector<std::vector<int>> ForestAutomaton::rules_by_lhs() const {
  std::vector<std::vector<int>> out(states.size());
  for (std::size_t r = 0; r < rules.size(); ++r) out[rules[r].lhs].push_back(static_cast<int>(r));
  return out;
}

bool ForestAutomaton::has_cycle() const {
  std::vector<std::vector<int>> succ(states.size());
  for (const auto& r : rules)
    for (int c : r.children) succ[r.lhs].push_back(c);
  std::vector<int> colour(states.size(), 0);
  std::function<bool(int)> visit = [&](int q) {
    colour[q] = 1;
    for (int c : succ[q])
      if (colour[c] == 1 || (colour[c] == 0 && visit(c))) return true;
    colour[q] = 2;
    return false;
  };
  for (std::size_t q = 0; q < states.size(); ++q)
    if (colour[q] == 0 && visit(static_cast<int>(q))) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Construction

ForestAutomaton build_forest_automaton(const Cfg& g, const std::vector<std::string>& w) {
  for (const auto& tok : w)
    if (!g.is_terminal(tok)) throw PreconditionError("unknown terminal '" + tok + "' in input");
  const int n = static_cast<int>(w.size());

  // productive spans per symbol, saturated to a fixpoint
  std::map<std::string, std::vector<std::vector<char>>> span;
  auto table = [&](const std::string& x) -> std::vector<std::vector<char>>& {
    auto& t = span[x];
    if (t.empty()) t.assign(n + 1, std::vector<char>(n + 1, 0));
    return t;
  };
  for (int i = 0; i < n; ++i) table(w[i])[i][i + 1] = 1;
  auto& eps = table(kEpsilon);
  for (int i = 0; i <= n; ++i) eps[i][i] = 1;
  for (const auto& a : g.nonterminals) table(a);
  for (const auto& a : g.terminals) table(a);

  auto rhs_symbol = [](const Production& p, std::size_t k) -> const std::string& {
    static const std::string e = kEpsilon;
    return p.rhs.empty() ? e : p.rhs[k];
  };
  auto rhs_len = [](const Production& p) { return p.rhs.empty() ? std::size_t{1} : p.rhs.size(); };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      auto& lhs = span[p.lhs];
      for (int i = 0; i <= n; ++i) {
        std::vector<char> reach(n + 1, 0);
        reach[i] = 1;
        for (std::size_t k = 0; k < rhs_len(p); ++k) {
          const auto& t = span[rhs_symbol(p, k)];
          std::vector<char> next(n + 1, 0);
          for (int a = 0; a <= n; ++a)
            if (reach[a])
              for (int b = a; b <= n; ++b)
                if (t[a][b]) next[b] = 1;
          reach.swap(next);
        }
        for (int j = i; j <= n; ++j)
          if (reach[j] && !lhs[i][j]) {
            lhs[i][j] = 1;
            changed = true;
          }
      }
    }
  }

  ForestAutomaton a;
  a.word = w;
  a.flavor = ForestFlavor::plain;
  for (int i = 0; i < n; ++i) {
    a.rules.push_back({a.add_state({i, w[i], i + 1}), w[i], {}});
  }
  bool uses_eps = false;
  for (const auto& p : g.productions) uses_eps = uses_eps || p.rhs.empty();
  if (uses_eps)
    for (int i = 0; i <= n; ++i) a.rules.push_back({a.add_state({i, kEpsilon, i}), kEpsilon, {}});

  for (const auto& p : g.productions) {
    std::size_t m = rhs_len(p);
    std::vector<int> cuts(m + 1);
    std::function<void(std::size_t)> extend = [&](std::size_t k) {
      if (k == m) {
        std::vector<int> kids;
        for (std::size_t c = 0; c < m; ++c)
          kids.push_back(a.add_state({cuts[c], rhs_symbol(p, c), cuts[c + 1]}));
        int lhs = a.add_state({cuts[0], p.lhs, cuts[m]});
        a.rules.push_back({lhs, p.lhs, std::move(kids)});
        return;
      }
      const auto& t = span[rhs_symbol(p, k)];
      for (int b = cuts[k]; b <= n; ++b)
        if (t[cuts[k]][b]) {
          cuts[k + 1] = b;
          extend(k + 1);
        }
    };
    for (int i = 0; i <= n; ++i) {
      cuts[0] = i;
      extend(0);
    }
  }
  if (span[g.axiom][0][n]) a.initial = a.add_state({0, g.axiom, n});
  return a;
}

ForestAutomaton trim(const ForestAutomaton& a) {
  const std::size_t ns = a.states.size();
  std::vector<char> productive(ns, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : a.rules) {
      if (productive[r.lhs]) continue;
      if (std::all_of(r.children.begin(), r.children.end(), [&](int c) { return productive[c]; })) {
        productive[r.lhs] = 1;
        changed = true;
      }
    }
  }
  ForestAutomaton out;
  out.word = a.word;
  out.flavor = a.flavor == ForestFlavor::localized ? ForestFlavor::localized : ForestFlavor::trimmed;
  if (a.initial < 0 || !productive[a.initial]) return out;

  auto by_lhs = a.rules_by_lhs();
  std::vector<char> reachable(ns, 0);
  std::vector<int> stack{a.initial};
  reachable[a.initial] = 1;
  std::vector<int> kept_rules;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int r : by_lhs[q]) {
      const auto& rule = a.rules[r];
      if (!std::all_of(rule.children.begin(), rule.children.end(),
                       [&](int c) { return productive[c]; }))
        continue;
      kept_rules.push_back(r);
      for (int c : rule.children)
        if (!reachable[c]) {
          reachable[c] = 1;
          stack.push_back(c);
        }
    }
  }
  std::sort(kept_rules.begin(), kept_rules.end());
  out.initial = out.add_state(a.states[a.initial]);
  for (int r : kept_rules) {
    const auto& rule = a.rules[r];
    ForestRule nr{out.add_state(a.states[rule.lhs]), rule.label, {}};
    for (int c : rule.children) nr.children.push_back(out.add_state(a.states[c]));
    out.rules.push_back(std::move(nr));
  }
  return out;
}

ForestAutomaton localize(const ForestAutomaton& a) {
  ForestAutomaton out = a;
  for (auto& r : out.rules) r.label = out.states[r.lhs].name();
  out.flavor = ForestFlavor::localized;
  return out;
}

// ---------------------------------------------------------------------------
// Counting

std::string TreeCount::str() const { return infinite ? "inf" : value.str(); }

TreeCount count_trees(const ForestAutomaton& a) {
  TreeCount out;
  if (a.empty()) return out;
  ForestAutomaton t = a.flavor == ForestFlavor::plain ? trim(a) : a;
  if (t.empty()) return out;
  if (t.has_cycle()) {
    out.infinite = true;
    return out;
  }
  auto by_lhs = t.rules_by_lhs();
  std::vector<std::optional<boost::multiprecision::cpp_int>> memo(t.states.size());
  std::function<boost::multiprecision::cpp_int(int)> count = [&](int q) {
    if (memo[q]) return *memo[q];
    boost::multiprecision::cpp_int total = 0;
    for (int r : by_lhs[q]) {
      boost::multiprecision::cpp_int prod = 1;
      for (int c : t.rules[r].children) prod *= count(c);
      total += prod;
    }
    memo[q] = total;
    return total;
  };
  out.value = count(t.initial);
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

TreeEnumerator::TreeEnumerator(const ForestAutomaton& a, std::size_t budget)
    : a_(a), budget_(budget), by_lhs_(a.rules_by_lhs()), total_(count_trees(a)) {
  if (a.empty() || (!total_.infinite && total_.value == 0)) done_ = true;
}

void TreeEnumerator::combine(const ForestRule& r, std::size_t k, std::size_t remaining,
                             std::vector<const Tree*>& picked, std::vector<Tree>& out) {
  if (k == r.children.size()) {
    if (remaining != 0) return;
    Tree t(r.label);
    for (const Tree* p : picked) t.children.push_back(*p);
    out.push_back(std::move(t));
    return;
  }
  std::size_t rest = r.children.size() - k - 1;  // each later child needs >= 1 node
  if (remaining < rest + 1) return;
  for (std::size_t s = 1; s + rest <= remaining; ++s) {
    const auto& sub = trees_of(r.children[k], s);
    for (const Tree& t : sub) {
      picked.push_back(&t);
      combine(r, k + 1, remaining - s, picked, out);
      picked.pop_back();
    }
  }
}

const std::vector<Tree>& TreeEnumerator::trees_of(int q, std::size_t size) {
  auto key = std::make_pair(q, size);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<Tree> out;
  for (int r : by_lhs_[q]) {
    const ForestRule& rule = a_.rules[r];
    if (rule.children.empty()) {
      if (size == 1) out.emplace_back(rule.label);
      continue;
    }
    std::vector<const Tree*> picked;
    combine(rule, 0, size - 1, picked, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return memo_.emplace(key, std::move(out)).first->second;
}

std::optional<Tree> TreeEnumerator::next() {
  if (done_) return std::nullopt;
  if (emitted_ >= budget_) {
    truncated_ = true;
    done_ = true;
    return std::nullopt;
  }
  for (;;) {
    if (size_ == 0) size_ = 1;
    const auto& level = trees_of(a_.initial, size_);
    if (cursor_ < level.size()) {
      ++emitted_;
      Tree t = level[cursor_++];
      if (!total_.infinite && emitted_ == total_.value) done_ = true;
      return t;
    }
    // a finite language always ends through the count check above
    ++size_;
    cursor_ = 0;
  }
}

std::vector<Tree> enumerate_trees(const ForestAutomaton& a, std::size_t budget, bool* truncated) {
  TreeEnumerator e(a, budget);
  std::vector<Tree> out;
  while (auto t = e.next()) out.push_back(std::move(*t));
  if (truncated) *truncated = e.truncated();
  return out;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

std::map<std::string, std::vector<int>> rules_by_label(const ForestAutomaton& a) {
  std::map<std::string, std::vector<int>> m;
  for (std::size_t r = 0; r < a.rules.size(); ++r) m[a.rules[r].label].push_back(static_cast<int>(r));
  return m;
}

}  // namespace

std::optional<Tree> annotate_run(const ForestAutomaton& a, const Tree& t) {
  if (a.empty()) return std::nullopt;
  auto by_label = rules_by_label(a);
  // memoized bottom-up state sets keyed by subtree address
  std::map<const Tree*, std::vector<int>> sets;
  std::function<void(const Tree&)> up = [&](const Tree& u) {
    for (const auto& c : u.children) up(c);
    std::vector<int> here;
    if (auto it = by_label.find(u.label); it != by_label.end()) {
      for (int r : it->second) {
        const auto& rule = a.rules[r];
        if (rule.children.size() != u.children.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < u.children.size() && ok; ++k) {
          const auto& s = sets[&u.children[k]];
          ok = std::binary_search(s.begin(), s.end(), rule.children[k]);
        }
        if (ok) here.push_back(rule.lhs);
      }
    }
    std::sort(here.begin(), here.end());
    here.erase(std::unique(here.begin(), here.end()), here.end());
    sets[&u] = here;
  };
  up(t);
  if (!std::binary_search(sets[&t].begin(), sets[&t].end(), a.initial)) return std::nullopt;

  std::function<Tree(const Tree&, int)> down = [&](const Tree& u, int q) {
    Tree out(a.states[q].name());
    for (int r : by_label[u.label]) {
      const auto& rule = a.rules[r];
      if (rule.lhs != q || rule.children.size() != u.children.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < u.children.size() && ok; ++k) {
        const auto& s = sets[&u.children[k]];
        ok = std::binary_search(s.begin(), s.end(), rule.children[k]);
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < u.children.size(); ++k)
        out.children.push_back(down(u.children[k], rule.children[k]));
      return out;
    }
    throw Error("inconsistent run annotation");
  };
  return down(t, a.initial);
}

bool accepts_tree(const ForestAutomaton& a, const Tree& t) {
  return annotate_run(a, t).has_value();
}

Tree delocalize(const Tree& t) {
  Tree out(t.label);
  if (auto q = parse_state_name(t.label)) out.label = q->x;
  for (const auto& c : t.children) out.children.push_back(delocalize(c));
  return out;
}

}  // namespace pfmc
