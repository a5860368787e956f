#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pfmc/grammar.hpp"
#include "pfmc/pdl.hpp"
#include "pfmc/tree.hpp"

namespace pfmc {

/// Does some parse tree of `word` under `grammar` satisfy `formula`?
struct PfmcInstance {
  Cfg grammar;
  std::vector<std::string> word;
  pdl::NodeFormula formula;
};

enum class Verdict { satisfiable, unsatisfiable, unknown };
enum class Method { enumerate, dtd, rotate };

std::string verdict_name(Verdict v);
std::string method_name(Method m);
/// "enumerate", "dtd" or "rotate"; throws PreconditionError otherwise.
Method parse_method(const std::string& s);

struct SolveStats {
  std::size_t trees_visited = 0;
  bool truncated = false;            // enumeration stopped by the budget
  std::size_t forest_states = 0;
  std::size_t dtd_symbols = 0;
  std::size_t automaton_states = 0;
  std::size_t summaries = 0;         // emptiness search
  double elapsed_ms = 0;
};

struct PfmcAnswer {
  Verdict verdict = Verdict::unknown;
  std::optional<Tree> witness;
  Method method = Method::enumerate;
  SolveStats stats;
};

inline constexpr std::size_t kDefaultBudget = 10000;

struct SolveOptions {
  std::optional<Method> method;  // override; must suit the grammar class
  std::size_t budget = kDefaultBudget;
  bool witness = true;
};

/// Picks the method from the grammar class unless overridden.
PfmcAnswer solve(const PfmcInstance& inst, const SolveOptions& opts = {});
/// Method chosen by solve() without an override.
Method default_method(const Cfg& g);

PfmcAnswer solve_enumerate(const PfmcInstance& inst, std::size_t budget = kDefaultBudget);
PfmcAnswer solve_acyclic_dtd(const PfmcInstance& inst, bool witness = true);
PfmcAnswer solve_epsfree_rotation(const PfmcInstance& inst, bool witness = true);

struct FilterResult {
  std::vector<Tree> trees;  // satisfying parse trees, in enumeration order
  std::size_t visited = 0;
  bool truncated = false;  // the budget ended the stream before the forest did
};

/// Parse trees of the word that satisfy the formula; stops after `limit`
/// matches when limit > 0.
FilterResult filter_forest(const PfmcInstance& inst, std::size_t budget, std::size_t limit = 0);

/// Is there a tree of rank at most 2 with root label `root`, yield `word`
/// and no eps leaves, satisfying `formula`? Propositions are `props`.
bool recognize(const pdl::NodeFormula& formula, const std::vector<std::string>& word,
               const std::vector<std::string>& props, const std::string& root);
/// The grammar recognize() builds: one nonterminal copy per proposition.
Cfg universal_grammar(const std::vector<std::string>& props, const std::string& root);
/// Name of the nonterminal copy of proposition p in universal_grammar.
std::string nonterminal_copy(const std::vector<std::string>& props, const std::string& p);

enum class OracleVerdict { satisfiable, unsatisfiable_within_bound, unknown };
std::string oracle_name(OracleVerdict v);

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::unknown;
  std::optional<Tree> witness;
  std::size_t trees = 0;
  bool complete = false;  // every tree of the forest was within the bound
};

/// Checks every parse tree with at most `max_nodes` nodes.
OracleResult oracle_bruteforce(const PfmcInstance& inst, std::size_t max_nodes);

/// Atoms that no node of the grammar can carry become false.
pdl::NodeFormula restrict_to_grammar(const pdl::NodeFormula& f, const Cfg& g);

}  // namespace pfmc
