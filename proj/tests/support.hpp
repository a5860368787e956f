// Shared generators and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pfmc/grammar.hpp"
#include "pfmc/pdl.hpp"
#include "pfmc/tree.hpp"

namespace testing_support {

using Rng = std::mt19937;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) {
  return read_file(std::string(PFMC_FIXTURES) + "/" + name);
}

inline int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform(rng, 0, static_cast<int>(v.size()) - 1)];
}

/// Random tree with depth at most max_depth (a single node has depth 1).
inline pfmc::Tree random_tree(Rng& rng, const std::vector<std::string>& labels, int max_depth,
                              int max_children = 3) {
  pfmc::Tree t(pick(rng, labels));
  if (max_depth > 1) {
    int k = uniform(rng, 0, max_children);
    for (int i = 0; i < k; ++i) t.children.push_back(random_tree(rng, labels, max_depth - 1, max_children));
  }
  return t;
}

pfmc::pdl::PathFormula random_path(Rng& rng, const std::vector<std::string>& atoms, int budget);

/// Random core-syntax node formula with roughly `budget` constructors.
inline pfmc::pdl::NodeFormula random_node(Rng& rng, const std::vector<std::string>& atoms, int budget) {
  using namespace pfmc::pdl;
  if (budget <= 1) {
    int r = uniform(rng, 0, 5);
    return r == 0 ? top() : atom(pick(rng, atoms));
  }
  switch (uniform(rng, 0, 3)) {
    case 0:
      return neg(random_node(rng, atoms, budget - 1));
    case 1: {
      int l = uniform(rng, 1, budget - 2 > 0 ? budget - 2 : 1);
      return conj(random_node(rng, atoms, l), random_node(rng, atoms, budget - 1 - l));
    }
    default: {
      int l = uniform(rng, 1, budget - 2 > 0 ? budget - 2 : 1);
      return diamond(random_path(rng, atoms, l), random_node(rng, atoms, budget - 1 - l));
    }
  }
}

inline pfmc::pdl::PathFormula random_path(Rng& rng, const std::vector<std::string>& atoms, int budget) {
  using namespace pfmc::pdl;
  if (budget <= 1) {
    switch (uniform(rng, 0, 3)) {
      case 0: return down();
      case 1: return right();
      case 2: return up();
      default: return left();
    }
  }
  switch (uniform(rng, 0, 5)) {
    case 0: {
      int l = uniform(rng, 1, budget - 2 > 0 ? budget - 2 : 1);
      return seq(random_path(rng, atoms, l), random_path(rng, atoms, budget - 1 - l));
    }
    case 1: {
      int l = uniform(rng, 1, budget - 2 > 0 ? budget - 2 : 1);
      return choice(random_path(rng, atoms, l), random_path(rng, atoms, budget - 1 - l));
    }
    case 2:
      return star(random_path(rng, atoms, budget - 1));
    case 3:
      return inverse(random_path(rng, atoms, budget - 1));
    case 4:
      return test(random_node(rng, atoms, budget - 1));
    default:
      return random_path(rng, atoms, 1);
  }
}

/// Textbook relational semantics over explicit pair sets, written
/// independently of the library evaluator.
class NaiveSemantics {
 public:
  using Rel = std::set<std::pair<int, int>>;

  explicit NaiveSemantics(const pfmc::Tree& t) { index(t, -1); }

  int size() const { return static_cast<int>(labels_.size()); }

  std::set<int> node(const pfmc::pdl::NodeFormula& f) const {
    using pfmc::pdl::NodeKind;
    std::set<int> out;
    switch (f->kind) {
      case NodeKind::atom:
        for (int u = 0; u < size(); ++u)
          if (labels_[u] == f->atom) out.insert(u);
        break;
      case NodeKind::top:
        for (int u = 0; u < size(); ++u) out.insert(u);
        break;
      case NodeKind::negation: {
        auto in = node(f->lhs);
        for (int u = 0; u < size(); ++u)
          if (!in.count(u)) out.insert(u);
        break;
      }
      case NodeKind::conjunction: {
        auto a = node(f->lhs), b = node(f->rhs);
        for (int u : a)
          if (b.count(u)) out.insert(u);
        break;
      }
      case NodeKind::diamond: {
        auto r = path(f->path);
        auto s = node(f->lhs);
        for (auto [u, v] : r)
          if (s.count(v)) out.insert(u);
        break;
      }
    }
    return out;
  }

  Rel path(const pfmc::pdl::PathFormula& p) const {
    using pfmc::pdl::PathKind;
    Rel out;
    switch (p->kind) {
      case PathKind::down:
        for (int u = 0; u < size(); ++u)
          if (parent_[u] >= 0) out.insert({parent_[u], u});
        break;
      case PathKind::right:
        for (int u = 0; u < size(); ++u)
          for (int v = 0; v < size(); ++v)
            if (parent_[u] >= 0 && parent_[u] == parent_[v] && rank_[v] == rank_[u] + 1)
              out.insert({u, v});
        break;
      case PathKind::sequence: {
        auto a = path(p->lhs), b = path(p->rhs);
        for (auto [u, v] : a)
          for (auto [x, y] : b)
            if (v == x) out.insert({u, y});
        break;
      }
      case PathKind::choice: {
        out = path(p->lhs);
        auto b = path(p->rhs);
        out.insert(b.begin(), b.end());
        break;
      }
      case PathKind::star: {
        auto a = path(p->lhs);
        for (int u = 0; u < size(); ++u) out.insert({u, u});
        bool grew = true;
        while (grew) {
          grew = false;
          Rel add;
          for (auto [u, v] : out)
            for (auto [x, y] : a)
              if (v == x && !out.count({u, y})) add.insert({u, y});
          if (!add.empty()) {
            grew = true;
            out.insert(add.begin(), add.end());
          }
        }
        break;
      }
      case PathKind::inverse:
        for (auto [u, v] : path(p->lhs)) out.insert({v, u});
        break;
      case PathKind::test:
        for (int u : node(p->test)) out.insert({u, u});
        break;
    }
    return out;
  }

 private:
  void index(const pfmc::Tree& t, int parent) {
    int me = size();
    labels_.push_back(t.label);
    parent_.push_back(parent);
    rank_.push_back(0);
    int k = 0;
    for (const auto& c : t.children) {
      int id = size();
      index(c, me);
      rank_[id] = k++;
    }
  }

  std::vector<std::string> labels_;
  std::vector<int> parent_, rank_;
};

struct CfgShape {
  int nonterminals = 3;
  std::vector<std::string> terminals{"a", "b"};
  int max_alternatives = 3;
  int max_rhs = 3;
  bool allow_epsilon = false;
};

/// Random grammar over nonterminals N0..N{k-1} with axiom N0.
inline pfmc::Cfg random_cfg(Rng& rng, const CfgShape& shape) {
  pfmc::Cfg g;
  std::vector<std::string> nts, vocab;
  for (int i = 0; i < shape.nonterminals; ++i) nts.push_back("N" + std::to_string(i));
  vocab = nts;
  vocab.insert(vocab.end(), shape.terminals.begin(), shape.terminals.end());
  g.axiom = nts[0];
  g.nonterminals.insert(nts.begin(), nts.end());
  for (const auto& a : nts) {
    int alts = uniform(rng, 1, shape.max_alternatives);
    for (int k = 0; k < alts; ++k) {
      pfmc::Production p{a, {}};
      int len = uniform(rng, shape.allow_epsilon ? 0 : 1, shape.max_rhs);
      for (int m = 0; m < len; ++m) p.rhs.push_back(pick(rng, vocab));
      if (std::find(g.productions.begin(), g.productions.end(), p) == g.productions.end())
        g.productions.push_back(p);
    }
  }
  for (const auto& p : g.productions)
    for (const auto& x : p.rhs)
      if (!g.nonterminals.count(x)) g.terminals.insert(x);
  // every listed terminal must occur somewhere so random words stay valid
  for (const auto& t : shape.terminals)
    if (!g.terminals.count(t)) {
      g.productions.push_back({pick(rng, nts), {t}});
      g.terminals.insert(t);
    }
  return g;
}

inline std::vector<std::string> random_word(Rng& rng, const std::vector<std::string>& terminals, int len) {
  std::vector<std::string> w;
  for (int i = 0; i < len; ++i) w.push_back(pick(rng, terminals));
  return w;
}

/// A word derived from the axiom by a random bounded derivation, so that
/// forests are usually nonempty; falls back to a random word.
inline std::vector<std::string> sample_word(Rng& rng, const pfmc::Cfg& g, int max_len) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<std::string> form{g.axiom};
    bool ok = true;
    for (int step = 0; step < 30 && ok; ++step) {
      auto it = std::find_if(form.begin(), form.end(), [&](const std::string& x) { return g.is_nonterminal(x); });
      if (it == form.end()) break;
      std::vector<const pfmc::Production*> alts;
      for (const auto& p : g.productions)
        if (p.lhs == *it) alts.push_back(&p);
      const pfmc::Production* p = pick(rng, alts);
      it = form.erase(it);
      form.insert(it, p->rhs.begin(), p->rhs.end());
      if (static_cast<int>(form.size()) > max_len + 2) ok = false;
    }
    if (!ok || static_cast<int>(form.size()) > max_len) continue;
    if (std::any_of(form.begin(), form.end(), [&](const std::string& x) { return g.is_nonterminal(x); }))
      continue;
    return form;
  }
  std::vector<std::string> ts(g.terminals.begin(), g.terminals.end());
  return random_word(rng, ts, uniform(rng, 1, max_len));
}

/// Direct check of the parse-tree conditions: axiom at the root,
/// productions at internal nodes, terminals or eps at the leaves.
inline bool is_parse_tree(const pfmc::Cfg& g, const pfmc::Tree& t, bool at_root = true) {
  if (at_root && t.label != g.axiom) return false;
  if (t.children.empty()) return g.is_terminal(t.label) || t.label == pfmc::kEpsilon;
  if (!g.is_nonterminal(t.label)) return false;
  std::vector<std::string> kids;
  for (const auto& c : t.children) kids.push_back(c.label);
  bool matched = false;
  for (const auto& p : g.productions) {
    if (p.lhs != t.label) continue;
    if (p.rhs == kids || (p.rhs.empty() && kids == std::vector<std::string>{pfmc::kEpsilon})) matched = true;
  }
  if (!matched) return false;
  for (const auto& c : t.children)
    if (!is_parse_tree(g, c, false)) return false;
  return true;
}

/// All parse trees of w with at most max_size nodes, by direct top-down
/// derivation (no automaton involved).
class DerivationOracle {
 public:
  DerivationOracle(const pfmc::Cfg& g, std::vector<std::string> w) : g_(g), w_(std::move(w)) {}

  std::vector<pfmc::Tree> all(std::size_t max_size) {
    std::vector<pfmc::Tree> out;
    for (std::size_t s = 1; s <= max_size; ++s) {
      const auto& v = exact(g_.axiom, 0, static_cast<int>(w_.size()), s);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  const std::vector<pfmc::Tree>& exact(const std::string& x, int i, int j, std::size_t size) {
    auto key = std::make_tuple(x, i, j, size);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<pfmc::Tree> out;
    if (g_.is_terminal(x)) {
      if (size == 1 && j == i + 1 && w_[i] == x) out.emplace_back(x);
    } else {
      for (const auto& p : g_.productions) {
        if (p.lhs != x) continue;
        if (p.rhs.empty()) {
          if (size == 2 && i == j) out.emplace_back(x, std::vector<pfmc::Tree>{pfmc::Tree(pfmc::kEpsilon)});
          continue;
        }
        std::vector<pfmc::Tree> kids;
        fill(p.rhs, 0, i, j, size - 1, x, kids, out);
      }
    }
    return memo_[key] = std::move(out);
  }

 private:
  void fill(const std::vector<std::string>& rhs, std::size_t k, int i, int j, std::size_t budget,
            const std::string& x, std::vector<pfmc::Tree>& kids, std::vector<pfmc::Tree>& out) {
    if (k == rhs.size()) {
      if (i == j && budget == 0) out.emplace_back(x, kids);
      return;
    }
    for (int m = i; m <= j; ++m)
      for (std::size_t s = 1; s <= budget; ++s)
        for (const auto& t : exact(rhs[k], i, m, s)) {
          kids.push_back(t);
          fill(rhs, k + 1, m, j, budget - s, x, kids, out);
          kids.pop_back();
        }
  }

  const pfmc::Cfg& g_;
  std::vector<std::string> w_;
  std::map<std::tuple<std::string, int, int, std::size_t>, std::vector<pfmc::Tree>> memo_;
};

}  // namespace testing_support
