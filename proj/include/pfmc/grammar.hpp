#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pfmc/pdl.hpp"
#include "pfmc/tree.hpp"

namespace pfmc {

struct Production {
  std::string lhs;
  std::vector<std::string> rhs;  // empty: epsilon production
  friend bool operator==(const Production&, const Production&) = default;
};

/// Context-free grammar with feature decorations.
struct Cfg {
  std::string axiom;
  std::set<std::string> nonterminals;
  std::set<std::string> terminals;
  std::vector<Production> productions;
  /// Symbols whose proposition set differs from {name}. Entries for
  /// declared features already include the symbol's own name.
  std::map<std::string, std::set<std::string>> features;

  bool is_nonterminal(const std::string& s) const { return nonterminals.count(s) > 0; }
  bool is_terminal(const std::string& s) const { return terminals.count(s) > 0; }
  std::set<std::string> features_of(const std::string& symbol) const;
  /// Labeling for model checking parse trees of this grammar.
  Labeling labeling() const;
  /// Every proposition that may hold at some node: symbols, features, eps.
  std::set<std::string> propositions() const;
  /// Validates the structural invariants; throws PreconditionError.
  void validate() const;

  friend bool operator==(const Cfg&, const Cfg&) = default;
};

Cfg parse_grammar_text(std::string_view text);
std::string print_grammar(const Cfg& g);

std::set<std::string> nullable_nonterminals(const Cfg& g);
bool check_acyclic(const Cfg& g);
bool check_epsilon_free(const Cfg& g);
/// Longest right-hand side.
std::size_t max_rhs_length(const Cfg& g);

struct BinarizedCfg {
  Cfg base;
  Cfg grammar;
  std::set<std::string> aux;
  /// origin[k] is the index in base.productions of grammar.productions[k].
  std::vector<std::size_t> origin;

  /// Rewrites a formula about parse trees of `base` into one about
  /// parse trees of `grammar`.
  pdl::NodeFormula transport(const pdl::NodeFormula& f) const;
  pdl::PathFormula transport(const pdl::PathFormula& p) const;
};

inline constexpr const char* kAuxFeature = "aux";

BinarizedCfg binarize(const Cfg& g);

/// Removes aux-labelled nodes, splicing their children into the parent.
Tree erase_aux(const Tree& t, const std::set<std::string>& aux);

/// The local-language formula whose models (over symbol identity) are
/// the parse trees of g.
pdl::NodeFormula grammar_to_pdl(const Cfg& g);

}  // namespace pfmc
