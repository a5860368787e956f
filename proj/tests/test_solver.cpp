#include <functional>

#include "doctest.h"
#include "pfmc/error.hpp"
#include "pfmc/forest.hpp"
#include "pfmc/solver.hpp"
#include "support.hpp"

using namespace pfmc;
using namespace testing_support;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

PfmcInstance instance(const std::string& grammar, const std::string& word, const std::string& formula) {
  return {parse_grammar_text(grammar), words(word), pdl::parse_node_formula(formula)};
}

bool satisfies(const Cfg& g, const Tree& t, const pdl::NodeFormula& f) {
  Labeling lab = g.labeling();
  pdl::EvalOptions opts;
  opts.labeling = &lab;
  opts.lenient = true;
  return pdl::model_check(t, f, opts);
}

// Every witness must be a parse tree of the word that satisfies the formula.
void check_answer(const PfmcInstance& inst, const PfmcAnswer& ans) {
  if (!ans.witness) return;
  CHECK(ans.verdict == Verdict::satisfiable);
  CHECK(is_parse_tree(inst.grammar, *ans.witness));
  CHECK(tree_yield(*ans.witness) == inst.word);
  CHECK(satisfies(inst.grammar, *ans.witness, inst.formula));
}

// Satisfiability among the parse trees of at most max_size nodes, found by
// top-down derivation.
bool derivation_sat(const PfmcInstance& inst, std::size_t max_size) {
  DerivationOracle o(inst.grammar, inst.word);
  for (const Tree& t : o.all(max_size))
    if (satisfies(inst.grammar, t, inst.formula)) return true;
  return false;
}

std::vector<std::string> atoms_of(const Cfg& g) {
  auto props = g.propositions();
  std::vector<std::string> v(props.begin(), props.end());
  v.push_back("zz");  // an atom no node carries
  return v;
}

const char* kShift =
    "(S (st if (C (ct true)) then (S (se if (C (ct true)) then (S (ss skip)) else (S (ss skip))))))";

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("cyk"), PreconditionError);
  CHECK(verdict_name(Verdict::unknown) == "unknown");
  CHECK(oracle_name(OracleVerdict::unsatisfiable_within_bound) == "unsatisfiable-within-bound");
}

TEST_CASE("dangling-else filter keeps the shift parse") {
  PfmcInstance inst{parse_grammar_text(fixture("dangling_else.cfg")),
                    words("if true then if true then skip else skip"),
                    pdl::parse_node_formula(fixture("dangling_else.pdl"))};
  CHECK(default_method(inst.grammar) == Method::enumerate);
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
    SolveOptions o;
    o.method = m;
    PfmcAnswer ans = solve(inst, o);
    CAPTURE(method_name(m));
    CHECK(ans.method == m);
    REQUIRE(ans.verdict == Verdict::satisfiable);
    REQUIRE(ans.witness);
    CHECK(to_sexpr(*ans.witness) == kShift);
    check_answer(inst, ans);
  }
  // the reduce parse alone is rejected
  inst.formula = pdl::conj(inst.formula, pdl::parse_node_formula("<down> se"));
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
    SolveOptions o;
    o.method = m;
    CHECK(solve(inst, o).verdict == Verdict::unsatisfiable);
  }
}

TEST_CASE("clitics") {
  Cfg g = parse_grammar_text(fixture("clitics.cfg"));
  pdl::NodeFormula f = pdl::parse_node_formula(fixture("clitics.pdl"));
  PfmcInstance ok{g, words("la philosophe le lui demande"), f};
  PfmcInstance bare{g, words("demande"), f};
  PfmcInstance both{g, words("elle le lui demande de reflechir"), f};
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
    CAPTURE(method_name(m));
    SolveOptions o;
    o.method = m;
    PfmcAnswer a = solve(ok, o);
    REQUIRE(a.verdict == Verdict::satisfiable);
    CHECK(to_sexpr(*a.witness) ==
          "(S (NPsuj (d la) (n philosophe)) (VN (clobj le) (claobj lui) (v demande)))");
    check_answer(ok, a);
    CHECK(solve(bare, o).verdict == Verdict::unsatisfiable);
    CHECK(solve(both, o).verdict == Verdict::unsatisfiable);
  }
  // the same sentences are grammatical without the constraints
  for (const auto* inst : {&bare, &both}) {
    PfmcInstance free = *inst;
    free.formula = pdl::top();
    CHECK(solve(free).verdict == Verdict::satisfiable);
  }
}

TEST_CASE("trivial instances") {
  PfmcInstance inst = instance("axiom S ; S -> \"a\" S | \"a\" | \"b\" ;", "b a", "true");
  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
    SolveOptions o;
    o.method = m;
    PfmcAnswer ans = solve(inst, o);
    CHECK(ans.verdict == Verdict::unsatisfiable);
    CHECK_FALSE(ans.witness);
  }
  inst.word = words("a a");
  inst.formula = pdl::bot();
  CHECK(solve_acyclic_dtd(inst).verdict == Verdict::unsatisfiable);
  inst.formula = pdl::top();
  PfmcAnswer ans = solve_acyclic_dtd(inst);
  CHECK(ans.verdict == Verdict::satisfiable);
  CHECK(to_sexpr(*ans.witness) == "(S a (S a))");
  // atoms outside the grammar are false, not errors
  inst.formula = pdl::atom("nowhere");
  CHECK(solve(inst).verdict == Verdict::unsatisfiable);
  inst.formula = pdl::neg(pdl::atom("nowhere"));
  CHECK(solve_epsfree_rotation(inst).verdict == Verdict::satisfiable);
}

TEST_CASE("cyclic unit grammar") {
  PfmcInstance inst = instance("axiom S ; S -> S | \"a\" ;", "a", "<down ; down ; down> a");
  CHECK(default_method(inst.grammar) == Method::rotate);
  PfmcAnswer ans = solve(inst);
  CHECK(ans.method == Method::rotate);
  REQUIRE(ans.verdict == Verdict::satisfiable);
  REQUIRE(ans.witness);
  check_answer(inst, ans);
  CHECK(ans.witness->depth() >= 4);

  PfmcAnswer en = solve_enumerate(inst, 100);
  REQUIRE(en.witness);
  CHECK(to_sexpr(*en.witness) == "(S (S (S a)))");

  inst.formula = pdl::atom("a");
  CHECK(solve(inst).verdict == Verdict::unsatisfiable);
  PfmcAnswer bounded = solve_enumerate(inst, 50);
  CHECK(bounded.verdict == Verdict::unknown);
  CHECK(bounded.stats.truncated);

  SolveOptions dtd;
  dtd.method = Method::dtd;
  CHECK_THROWS_AS(solve(inst, dtd), PreconditionError);
  CHECK_THROWS_AS(solve_acyclic_dtd(inst), PreconditionError);
}

TEST_CASE("cyclic grammar with epsilon falls back to enumeration") {
  PfmcInstance inst = instance("axiom S ; S -> S | S S | \"a\" | ;", "a", "false");
  CHECK(default_method(inst.grammar) == Method::enumerate);
  SolveOptions o;
  o.budget = 50;
  PfmcAnswer ans = solve(inst, o);
  CHECK(ans.verdict == Verdict::unknown);
  CHECK(ans.stats.trees_visited == 50);
  SolveOptions rot;
  rot.method = Method::rotate;
  CHECK_THROWS_AS(solve(inst, rot), PreconditionError);
  inst.formula = pdl::parse_node_formula("<down*> eps");
  ans = solve(inst, o);
  CHECK(ans.verdict == Verdict::satisfiable);
  check_answer(inst, ans);
}

TEST_CASE("methods agree on random acyclic instances") {
  Rng rng(101);
  int instances = 0, sat = 0;
  for (int i = 0; i < 2000 && instances < 100; ++i) {
    CfgShape shape;
    shape.nonterminals = uniform(rng, 1, 4);
    shape.allow_epsilon = i % 3 == 0;
    Cfg g = random_cfg(rng, shape);
    if (!check_acyclic(g)) continue;
    ++instances;
    PfmcInstance inst{g, sample_word(rng, g, 5), random_node(rng, atoms_of(g), uniform(rng, 1, 8))};
    CAPTURE(print_grammar(g));
    CAPTURE(pdl::print(inst.formula));
    bool truth = derivation_sat(inst, 200);
    sat += truth;
    Verdict expected = truth ? Verdict::satisfiable : Verdict::unsatisfiable;
    PfmcAnswer en = solve(inst);
    CHECK(en.verdict == expected);
    check_answer(inst, en);
    PfmcAnswer dt = solve_acyclic_dtd(inst);
    CHECK(dt.verdict == expected);
    check_answer(inst, dt);
    if (check_epsilon_free(g)) {
      PfmcAnswer ro = solve_epsfree_rotation(inst);
      CHECK(ro.verdict == expected);
      check_answer(inst, ro);
    }
  }
  CHECK(instances == 100);
  CHECK(sat > 10);
  CHECK(sat < 90);
}

TEST_CASE("rotation agrees with enumeration on cyclic epsilon-free instances") {
  Rng rng(103);
  int instances = 0, confirmed = 0;
  for (int i = 0; i < 2000 && instances < 50; ++i) {
    CfgShape shape;
    shape.nonterminals = uniform(rng, 1, 3);
    shape.max_rhs = 2;
    Cfg g = random_cfg(rng, shape);
    if (check_acyclic(g)) continue;
    PfmcInstance inst{g, sample_word(rng, g, 3), random_node(rng, atoms_of(g), uniform(rng, 1, 8))};
    ForestAutomaton a = trim(build_forest_automaton(g, inst.word));
    if (a.empty() || !count_trees(a).infinite) continue;
    ++instances;
    CAPTURE(print_grammar(g));
    CAPTURE(pdl::print(inst.formula));
    PfmcAnswer ro = solve_epsfree_rotation(inst);
    check_answer(inst, ro);
    PfmcAnswer en = solve_enumerate(inst, 300);
    CHECK(en.verdict != Verdict::unsatisfiable);
    if (en.verdict == Verdict::satisfiable) {
      ++confirmed;
      CHECK(ro.verdict == Verdict::satisfiable);
    }
    // negation closure on a nonempty forest
    PfmcInstance neg = inst;
    neg.formula = pdl::neg(inst.formula);
    if (ro.verdict == Verdict::unsatisfiable) CHECK(solve_epsfree_rotation(neg).verdict == Verdict::satisfiable);
  }
  CHECK(instances == 50);
  CHECK(confirmed > 10);
}

TEST_CASE("negation closure and budget monotonicity") {
  Rng rng(107);
  int instances = 0;
  for (int i = 0; i < 1000 && instances < 40; ++i) {
    CfgShape shape;
    shape.nonterminals = uniform(rng, 1, 3);
    shape.allow_epsilon = true;
    Cfg g = random_cfg(rng, shape);
    PfmcInstance inst{g, sample_word(rng, g, 3), random_node(rng, atoms_of(g), uniform(rng, 1, 6))};
    if (trim(build_forest_automaton(g, inst.word)).empty()) continue;
    ++instances;
    CAPTURE(print_grammar(g));
    CAPTURE(pdl::print(inst.formula));
    PfmcInstance neg = inst;
    neg.formula = pdl::neg(inst.formula);
    SolveOptions o;
    o.budget = 200;
    CHECK_FALSE((solve(inst, o).verdict == Verdict::unsatisfiable &&
                 solve(neg, o).verdict == Verdict::unsatisfiable));

    std::optional<Verdict> definite;
    for (std::size_t budget : {1, 10, 100, 1000}) {
      PfmcAnswer a = solve_enumerate(inst, budget);
      if (definite) CHECK(a.verdict == *definite);
      if (a.verdict != Verdict::unknown) definite = a.verdict;
    }
  }
  CHECK(instances == 40);
}

TEST_CASE("brute-force oracle") {
  PfmcInstance inst = instance("axiom S ; S -> S | \"a\" ;", "a", "<down ; down ; down> a");
  OracleResult r = oracle_bruteforce(inst, 4);
  CHECK(r.verdict == OracleVerdict::satisfiable);
  CHECK(to_sexpr(*r.witness) == "(S (S (S a)))");
  r = oracle_bruteforce(inst, 3);
  CHECK(r.verdict == OracleVerdict::unknown);
  CHECK_FALSE(r.complete);
  CHECK(r.trees == 2);

  // a finite forest explored completely
  inst = instance("axiom S ; S -> A | B ; A -> \"a\" ; B -> \"a\" ;", "a", "<down> C");
  r = oracle_bruteforce(inst, 10);
  CHECK(r.verdict == OracleVerdict::unsatisfiable_within_bound);
  CHECK(r.complete);
  CHECK(r.trees == 2);
  r = oracle_bruteforce(inst, 2);
  CHECK(r.verdict == OracleVerdict::unsatisfiable_within_bound);
  CHECK(r.trees == 0);

  Rng rng(109);
  int instances = 0;
  for (int i = 0; i < 1000 && instances < 40; ++i) {
    Cfg g = random_cfg(rng, CfgShape{});
    if (!check_acyclic(g) || !check_epsilon_free(g)) continue;
    ++instances;
    PfmcInstance p{g, sample_word(rng, g, 4), random_node(rng, atoms_of(g), uniform(rng, 1, 8))};
    Verdict v = solve_enumerate(p, std::numeric_limits<std::size_t>::max()).verdict;
    OracleVerdict o = oracle_bruteforce(p, 100).verdict;
    CHECK((v == Verdict::satisfiable) == (o == OracleVerdict::satisfiable));
    CHECK(o != OracleVerdict::unknown);
  }
}

namespace {

// All trees of rank at most 2 with labels in props, yield w[i..j) and
// depth at most d; stops once visit returns true.
bool search_trees(const std::vector<std::string>& props, const std::vector<std::string>& w, int i, int j,
                  int d, const std::function<bool(const Tree&)>& visit) {
  if (d < 1) return false;
  if (j - i == 1 && visit(Tree(w[i]))) return true;
  if (d < 2) return false;
  for (const auto& p : props) {
    bool found = search_trees(props, w, i, j, d - 1, [&](const Tree& c) {
      Tree t(p);
      t.children = {c};
      return visit(t);
    });
    if (found) return true;
    for (int k = i + 1; k < j; ++k) {
      found = search_trees(props, w, i, k, d - 1, [&](const Tree& l) {
        return search_trees(props, w, k, j, d - 1, [&](const Tree& r) {
          Tree t(p);
          t.children = {l, r};
          return visit(t);
        });
      });
      if (found) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("recognition through the universal grammar") {
  std::vector<std::string> ap{"s", "a", "b"};
  CHECK(recognize(pdl::top(), {"a", "b"}, ap, "s"));
  CHECK_FALSE(recognize(pdl::parse_node_formula("[down*] !b"), {"a", "b"}, ap, "s"));
  CHECK(recognize(pdl::parse_node_formula("<down ; down> s"), {"a", "b"}, ap, "s"));
  CHECK_FALSE(recognize(pdl::parse_node_formula("a"), {"a", "b"}, ap, "s"));
  CHECK_THROWS_AS(recognize(pdl::top(), {}, ap, "s"), PreconditionError);
  CHECK_THROWS_AS(recognize(pdl::top(), {"eps"}, ap, "s"), PreconditionError);
  CHECK_THROWS_AS(recognize(pdl::atom("c"), {"a"}, ap, "s"), PreconditionError);
  CHECK_THROWS_AS(recognize(pdl::top(), {"a"}, ap, "c"), PreconditionError);

  CHECK(nonterminal_copy(ap, "s") == "S");
  CHECK(nonterminal_copy({"s", "S"}, "s") == "s'");
  CHECK(nonterminal_copy({"s", "S"}, "S") == "S'");
  CHECK(nonterminal_copy({"x", "x'", "X"}, "x") == "x''");
  Cfg u = universal_grammar(ap, "s");
  CHECK(u.axiom == "S");
  CHECK(u.productions.size() == 3 * (6 + 36));
  CHECK(check_epsilon_free(u));

  Rng rng(113);
  int found = 0;
  for (int i = 0; i < 30; ++i) {
    std::vector<std::string> props(ap.begin(), ap.begin() + uniform(rng, 1, 3));
    auto w = random_word(rng, props, uniform(rng, 1, 3));
    std::string root = pick(rng, props);
    pdl::NodeFormula f = random_node(rng, props, uniform(rng, 1, 6));
    CAPTURE(pdl::print(f));
    bool got = recognize(f, w, props, root);
    int depth = w.size() == 3 ? 5 : 6;
    bool brute = search_trees(props, w, 0, static_cast<int>(w.size()), depth, [&](const Tree& t) {
      return !t.is_leaf() && t.label == root && pdl::model_check(t, f);
    });
    found += brute;
    if (brute) CHECK(got);
  }
  CHECK(found > 5);
}
