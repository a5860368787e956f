#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pfmc/forest.hpp"
#include "pfmc/grammar.hpp"
#include "pfmc/pdl.hpp"
#include "pfmc/tree.hpp"

namespace pfmc {

/// Epsilon-free NFA over string letters; states are 0..size-1.
struct Nfa {
  struct Edge {
    int from;
    std::string letter;
    int to;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  int size = 0;
  std::vector<Edge> edges;
  std::set<int> initial;
  std::set<int> final;

  int add_state() { return size++; }
  std::set<std::string> alphabet() const;
  bool accepts(const std::vector<std::string>& word) const;
  bool empty() const;
  /// Restricts to states both reachable and co-reachable.
  Nfa trimmed() const;
  /// True if the trimmed automaton has a cycle (infinite language).
  bool infinite() const;
  /// Letters on useful transitions.
  std::set<std::string> useful_letters() const;
  std::string to_regex() const;

  static Nfa epsilon();
  static Nfa word(const std::vector<std::string>& w);
};

Nfa nfa_union(const Nfa& a, const Nfa& b);
Nfa nfa_concat(const Nfa& a, const Nfa& b);

/// Document type: each symbol's children form a word of its content model.
struct Dtd {
  std::string start;
  std::map<std::string, Nfa> content;

  const Nfa& content_of(const std::string& x) const;
  bool has_symbol(const std::string& x) const { return content.count(x) > 0; }
  /// Edge A -> B when B labels a useful transition of content(A).
  std::map<std::string, std::set<std::string>> reach_graph() const;
  bool accepts(const Tree& t) const;
  /// One line per symbol, `NAME -> regex`.
  std::string dump() const;
};

bool is_nonrecursive(const Dtd& d);
/// Node count of the longest root-to-leaf path; requires a non-recursive DTD.
std::size_t max_depth(const Dtd& d);

/// Number of trees; content models are assumed unambiguous.
TreeCount count_dtd_trees(const Dtd& d);
/// L(d) by increasing size, then by Tree ordering.
std::vector<Tree> enumerate_dtd_trees(const Dtd& d, std::size_t budget, bool* truncated = nullptr);

/// A DTD together with the rewriting that carries formulas over to its trees.
struct DtdReduction {
  Dtd dtd;
  pdl::Substitution subst;
  /// Extra root above the tree's own root (chains at the initial state).
  bool virtual_root = false;

  /// Formula to check at the root of DTD trees.
  pdl::NodeFormula transform(const pdl::NodeFormula& f) const;
};

inline constexpr const char* kVirtualRoot = "vroot";

/// p -> disjunction of the states of `a` whose symbol carries p.
/// With `barred`, the barred copies are included.
std::map<std::string, pdl::NodeFormula> state_interpretation(const ForestAutomaton& a, const Cfg& g,
                                                             bool barred);

/// Homomorphic atom replacement; every atom must be interpreted.
pdl::NodeFormula relabel_formula(const pdl::NodeFormula& f,
                                 const std::map<std::string, pdl::NodeFormula>& interp);

/// Localized, trimmed forest automaton of an acyclic grammar as a DTD.
DtdReduction dtd_from_acyclic(const ForestAutomaton& localized, const Cfg& g);

/// Chain sequences out of state q: bar(q0) ... bar(q_{n-1}) q_n.
Nfa chains_nfa(const ForestAutomaton& a, int q);

/// Rotation of unit-rule chains into sibling sequences.
/// `a` is trimmed, epsilon-free, with at most two children per rule.
DtdReduction rotate_epsfree(const ForestAutomaton& a, const Cfg& g);

/// Image of a run tree (labels are state names) in the rotated DTD.
Tree rotate_tree(const Tree& run, bool virtual_root);
/// Inverse of rotate_tree: folds each barred sibling run back into a chain.
Tree unrotate_tree(const Tree& rotated, bool virtual_root);

/// The interpreted child and next-sibling steps over rotated trees.
pdl::PathFormula rotated_down(const std::vector<std::string>& barred, bool virtual_root);
pdl::PathFormula rotated_right(const std::vector<std::string>& barred);

}  // namespace pfmc
