#include "pfmc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

#include "pfmc/apwa.hpp"
#include "pfmc/dtd.hpp"
#include "pfmc/error.hpp"
#include "pfmc/forest.hpp"

namespace pfmc {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::satisfiable: return "satisfiable";
    case Verdict::unsatisfiable: return "unsatisfiable";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::enumerate: return "enumerate";
    case Method::dtd: return "dtd";
    case Method::rotate: return "rotate";
  }
  return "enumerate";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate})
    if (method_name(m) == s) return m;
  throw PreconditionError("unknown method '" + s + "' (expected enumerate, dtd or rotate)");
}

std::string oracle_name(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::satisfiable: return "satisfiable";
    case OracleVerdict::unsatisfiable_within_bound: return "unsatisfiable-within-bound";
    case OracleVerdict::unknown: return "unknown";
  }
  return "unknown";
}

pdl::NodeFormula restrict_to_grammar(const pdl::NodeFormula& f, const Cfg& g) {
  auto props = g.propositions();
  pdl::Substitution s;
  for (const auto& p : pdl::atoms(f))
    if (!props.count(p)) s.atoms[p] = pdl::bot();
  return s.atoms.empty() ? f : pdl::substitute(f, s);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool holds(const Tree& t, const pdl::NodeFormula& f, const Cfg& g) {
  Labeling lab = g.labeling();
  pdl::EvalOptions opts;
  opts.labeling = &lab;
  opts.lenient = true;
  return pdl::model_check(t, f, opts);
}

// Decides the reduced instance; returns the accepted DTD tree if any.
std::optional<Tree> decide(const DtdReduction& red, const pdl::NodeFormula& f, SolveStats& stats) {
  const int n = static_cast<int>(std::max<std::size_t>(1, max_depth(red.dtd)));
  std::vector<std::string> syms = dtd_symbols(red.dtd);
  Apwa prod = conjoin(at_root(compile_formula(red.transform(f), syms, n)), compile_dtd(red.dtd, n));
  stats.dtd_symbols = syms.size();
  stats.automaton_states = prod.size();
  EmptinessResult r = check_emptiness(prod, red.dtd);
  stats.summaries = r.summaries;
  if (r.empty) return std::nullopt;
  return stream_decode(*r.witness);
}

// The automata answer must agree with direct checks on the original grammar.
void validate_witness(const PfmcInstance& inst, const pdl::NodeFormula& f, const Tree& w) {
  ForestAutomaton a = trim(build_forest_automaton(inst.grammar, inst.word));
  if (!accepts_tree(a, w) || !holds(w, f, inst.grammar))
    throw Error("internal error: automaton witness " + to_sexpr(w) + " does not check out");
}

}  // namespace

Method default_method(const Cfg& g) {
  bool acyclic = check_acyclic(g), epsfree = check_epsilon_free(g);
  if (acyclic && epsfree) return Method::enumerate;
  if (acyclic) return Method::dtd;
  if (epsfree) return Method::rotate;
  return Method::enumerate;
}

PfmcAnswer solve_enumerate(const PfmcInstance& inst, std::size_t budget) {
  auto t0 = Clock::now();
  PfmcAnswer ans;
  ans.method = Method::enumerate;
  pdl::NodeFormula f = restrict_to_grammar(inst.formula, inst.grammar);
  ForestAutomaton a = trim(build_forest_automaton(inst.grammar, inst.word));
  ans.stats.forest_states = a.states.size();
  ans.verdict = Verdict::unsatisfiable;
  if (!a.empty()) {
    TreeEnumerator en(a, budget);
    while (auto t = en.next()) {
      ++ans.stats.trees_visited;
      if (holds(*t, f, inst.grammar)) {
        ans.verdict = Verdict::satisfiable;
        ans.witness = std::move(*t);
        break;
      }
    }
    if (!ans.witness && en.truncated()) {
      ans.verdict = Verdict::unknown;
      ans.stats.truncated = true;
    }
  }
  ans.stats.elapsed_ms = ms_since(t0);
  return ans;
}

FilterResult filter_forest(const PfmcInstance& inst, std::size_t budget, std::size_t limit) {
  FilterResult out;
  pdl::NodeFormula f = restrict_to_grammar(inst.formula, inst.grammar);
  ForestAutomaton a = trim(build_forest_automaton(inst.grammar, inst.word));
  if (a.empty()) return out;
  TreeEnumerator en(a, budget);
  while (auto t = en.next()) {
    ++out.visited;
    if (!holds(*t, f, inst.grammar)) continue;
    out.trees.push_back(std::move(*t));
    if (limit && out.trees.size() >= limit) return out;
  }
  out.truncated = en.truncated();
  return out;
}

PfmcAnswer solve_acyclic_dtd(const PfmcInstance& inst, bool witness) {
  if (!check_acyclic(inst.grammar)) throw PreconditionError("the dtd method needs an acyclic grammar");
  auto t0 = Clock::now();
  PfmcAnswer ans;
  ans.method = Method::dtd;
  pdl::NodeFormula f = restrict_to_grammar(inst.formula, inst.grammar);
  ForestAutomaton a = trim(build_forest_automaton(inst.grammar, inst.word));
  ans.stats.forest_states = a.states.size();
  ans.verdict = Verdict::unsatisfiable;
  if (!a.empty()) {
    DtdReduction red = dtd_from_acyclic(localize(a), inst.grammar);
    if (auto t = decide(red, f, ans.stats)) {
      ans.verdict = Verdict::satisfiable;
      if (witness) {
        ans.witness = delocalize(*t);
        validate_witness(inst, f, *ans.witness);
      }
    }
  }
  ans.stats.elapsed_ms = ms_since(t0);
  return ans;
}

PfmcAnswer solve_epsfree_rotation(const PfmcInstance& inst, bool witness) {
  if (!check_epsilon_free(inst.grammar))
    throw PreconditionError("the rotate method needs an epsilon-free grammar");
  auto t0 = Clock::now();
  PfmcAnswer ans;
  ans.method = Method::rotate;
  pdl::NodeFormula f = restrict_to_grammar(inst.formula, inst.grammar);
  BinarizedCfg b = binarize(inst.grammar);
  ForestAutomaton a = trim(build_forest_automaton(b.grammar, inst.word));
  ans.stats.forest_states = a.states.size();
  ans.verdict = Verdict::unsatisfiable;
  if (!a.empty()) {
    DtdReduction red = rotate_epsfree(a, b.grammar);
    if (auto t = decide(red, b.transport(f), ans.stats)) {
      ans.verdict = Verdict::satisfiable;
      if (witness) {
        ans.witness = erase_aux(delocalize(unrotate_tree(*t, red.virtual_root)), b.aux);
        validate_witness(inst, f, *ans.witness);
      }
    }
  }
  ans.stats.elapsed_ms = ms_since(t0);
  return ans;
}

PfmcAnswer solve(const PfmcInstance& inst, const SolveOptions& opts) {
  bool acyclic = check_acyclic(inst.grammar), epsfree = check_epsilon_free(inst.grammar);
  Method m = opts.method.value_or(default_method(inst.grammar));
  switch (m) {
    case Method::enumerate: {
      // finite forests are enumerated completely unless a budget is forced
      std::size_t budget = acyclic && !opts.method ? std::numeric_limits<std::size_t>::max() : opts.budget;
      return solve_enumerate(inst, budget);
    }
    case Method::dtd:
      if (!acyclic) throw PreconditionError("method dtd does not apply: the grammar is cyclic");
      return solve_acyclic_dtd(inst, opts.witness);
    case Method::rotate:
      if (!epsfree) throw PreconditionError("method rotate does not apply: the grammar has epsilon rules");
      return solve_epsfree_rotation(inst, opts.witness);
  }
  throw Error("unreachable method");
}

// ---------------------------------------------------------------- recognition

// Capitalized names when they are fresh and distinct; otherwise every
// proposition gets the same number of primes, enough to avoid all of them.
std::string nonterminal_copy(const std::vector<std::string>& props, const std::string& p) {
  std::set<std::string> taken(props.begin(), props.end()), caps;
  auto cap = [](std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  };
  bool capitalize = true;
  for (const auto& q : taken) capitalize = capitalize && !taken.count(cap(q)) && caps.insert(cap(q)).second;
  if (capitalize) return cap(p);
  std::string primes = "'";
  for (bool clash = true; clash; primes += "'") {
    clash = false;
    for (const auto& q : taken) clash = clash || taken.count(q + primes);
    if (!clash) break;
  }
  return p + primes;
}

Cfg universal_grammar(const std::vector<std::string>& props, const std::string& root) {
  if (std::find(props.begin(), props.end(), root) == props.end())
    throw PreconditionError("root '" + root + "' is not a proposition");
  Cfg g;
  std::vector<std::string> symbols;
  for (const auto& p : props) {
    if (p == kEpsilon) throw PreconditionError("eps cannot be a proposition of a recognized tree");
    g.terminals.insert(p);
    g.nonterminals.insert(nonterminal_copy(props, p));
    symbols.push_back(p);
    symbols.push_back(nonterminal_copy(props, p));
  }
  for (const auto& p : props) {
    std::string a = nonterminal_copy(props, p);
    for (const auto& x : symbols) g.productions.push_back({a, {x}});
    for (const auto& x : symbols)
      for (const auto& y : symbols) g.productions.push_back({a, {x, y}});
  }
  g.axiom = nonterminal_copy(props, root);
  g.validate();
  return g;
}

bool recognize(const pdl::NodeFormula& formula, const std::vector<std::string>& word,
               const std::vector<std::string>& props, const std::string& root) {
  if (word.empty()) throw PreconditionError("recognize needs a nonempty word");
  for (const auto& x : word) {
    if (x == kEpsilon) throw PreconditionError("eps cannot occur in a recognized word");
    if (std::find(props.begin(), props.end(), x) == props.end())
      throw PreconditionError("token '" + x + "' is not a proposition");
  }
  pdl::Substitution s;
  for (const auto& p : props) s.atoms[p] = pdl::disj(pdl::atom(nonterminal_copy(props, p)), pdl::atom(p));
  for (const auto& p : pdl::atoms(formula))
    if (!s.atoms.count(p)) throw PreconditionError("atom '" + p + "' is not a proposition");
  PfmcInstance inst{universal_grammar(props, root), word, pdl::substitute(formula, s)};
  return solve_epsfree_rotation(inst, false).verdict == Verdict::satisfiable;
}

// ---------------------------------------------------------------- oracle

OracleResult oracle_bruteforce(const PfmcInstance& inst, std::size_t max_nodes) {
  OracleResult out;
  pdl::NodeFormula f = restrict_to_grammar(inst.formula, inst.grammar);
  ForestAutomaton a = trim(build_forest_automaton(inst.grammar, inst.word));
  out.complete = true;
  if (!a.empty()) {
    TreeEnumerator en(a, std::numeric_limits<std::size_t>::max());
    while (auto t = en.next()) {
      if (t->size() > max_nodes) {
        out.complete = false;
        break;
      }
      ++out.trees;
      if (holds(*t, f, inst.grammar)) {
        out.verdict = OracleVerdict::satisfiable;
        out.witness = std::move(*t);
        return out;
      }
    }
  }
  bool infinite = !a.empty() && count_trees(a).infinite;
  out.verdict = infinite && !out.complete ? OracleVerdict::unknown : OracleVerdict::unsatisfiable_within_bound;
  return out;
}

}  // namespace pfmc
