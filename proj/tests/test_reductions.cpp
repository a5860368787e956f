#include "doctest.h"
#include "pfmc/error.hpp"
#include "pfmc/forest.hpp"
#include "pfmc/reductions.hpp"
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

bool holds(const PfmcInstance& inst, const Tree& t) {
  Labeling lab = inst.grammar.labeling();
  pdl::EvalOptions opts;
  opts.labeling = &lab;
  opts.lenient = true;
  return pdl::model_check(t, inst.formula, opts);
}

SatInstance sat(int n, std::vector<std::array<int, 3>> clauses) { return {n, std::move(clauses)}; }

}  // namespace

TEST_CASE("dimacs round trip and padding") {
  auto s = parse_dimacs("c comment\np cnf 3 2\n1 -2 3 0\n-1 0\n");
  CHECK(s.n == 3);
  REQUIRE(s.clauses.size() == 2);
  CHECK(s.clauses[0] == std::array<int, 3>{1, -2, 3});
  CHECK(s.clauses[1] == std::array<int, 3>{-1, -1, -1});
  auto again = parse_dimacs(print_dimacs(s));
  CHECK(again.n == s.n);
  CHECK(again.clauses == s.clauses);
  // clauses may span lines
  CHECK(parse_dimacs("p cnf 2 1\n1\n-2 0\n").clauses[0] == std::array<int, 3>{1, -2, -2});
}

TEST_CASE("dimacs errors") {
  CHECK_THROWS_AS(parse_dimacs("1 2 3 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs(""), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3 -1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 x 3 0\n"), ParseError);
  CHECK_THROWS_AS(sat3_to_pfmc(sat(2, {{1, 2, 3}})), PreconditionError);
  CHECK_THROWS_AS(sat3_to_pfmc(sat(2, {{1, 0, 2}})), PreconditionError);
}

TEST_CASE("3sat comb grammar shape") {
  for (int n = 1; n <= 6; ++n) {
    auto inst = sat3_to_pfmc(sat(n, {{1, 1, 1}}));
    CHECK(check_acyclic(inst.grammar));
    CHECK(check_epsilon_free(inst.grammar));
    CHECK(inst.word == std::vector<std::string>(n, "a"));
    auto count = count_trees(trim(build_forest_automaton(inst.grammar, inst.word)));
    CHECK_FALSE(count.infinite);
    CHECK(count.value == (boost::multiprecision::cpp_int(1) << n));
  }
}

TEST_CASE("3sat small examples") {
  auto one = sat(3, {{1, -2, 3}});
  int models = 0;
  for (int bits = 0; bits < 8; ++bits)
    models += satisfies(one, {bool(bits & 1), bool(bits & 2), bool(bits & 4)});
  CHECK(models == 7);
  auto contradiction = sat(1, {{1, 1, 1}, {-1, -1, -1}});
  CHECK_FALSE(brute_force_sat(contradiction));

  for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
    CAPTURE(method_name(m));
    SolveOptions opts;
    opts.method = m;
    auto inst = sat3_to_pfmc(one);
    auto ans = solve(inst, opts);
    CHECK(ans.verdict == Verdict::satisfiable);
    REQUIRE(ans.witness);
    CHECK(holds(inst, *ans.witness));
    auto v = comb_valuation(*ans.witness);
    CHECK(v.size() == 3);
    CHECK(satisfies(one, v));
    CHECK(solve(sat3_to_pfmc(contradiction), opts).verdict == Verdict::unsatisfiable);
  }
}

TEST_CASE("comb valuation reads variables from the root down") {
  // the root's leaf child is x1
  auto t = parse_sexpr("(S (S (S (T a)) (F a)) (T a))");
  CHECK(comb_valuation(t) == std::vector<bool>{true, false, true});
  auto inst = sat3_to_pfmc(sat(3, {{1, 1, 1}, {-2, -2, -2}, {3, 3, 3}}));
  CHECK(holds(inst, t));
  auto flipped = sat3_to_pfmc(sat(3, {{-1, -1, -1}, {2, 2, 2}}));
  CHECK_FALSE(holds(flipped, t));
}

TEST_CASE("3sat reduction agrees with exhaustive search") {
  Rng rng(20261017);
  int unsat = 0;
  for (int i = 0; i < 60; ++i) {
    auto s = random_3sat(rng, uniform(rng, 1, 6), uniform(rng, 1, 16));
    CAPTURE(print_dimacs(s));
    bool truth = brute_force_sat(s).has_value();
    unsat += !truth;
    auto inst = sat3_to_pfmc(s);
    for (Method m : {Method::enumerate, Method::dtd, Method::rotate}) {
      CAPTURE(method_name(m));
      SolveOptions opts;
      opts.method = m;
      auto ans = solve(inst, opts);
      CHECK((ans.verdict == Verdict::satisfiable) == truth);
      CHECK(ans.verdict != Verdict::unknown);
      if (ans.witness) CHECK(satisfies(s, comb_valuation(*ans.witness)));
    }
  }
  CHECK(unsat > 0);
}

TEST_CASE("lba parsing and validation") {
  auto m = parse_lba(fixture("lba/rewrite_once.lba"));
  CHECK(m.states == std::vector<std::string>{"q1", "q2", "q3"});
  CHECK(m.finals == std::set<std::string>{"q3"});
  CHECK(m.left_marker() == "<");
  CHECK(m.right_marker() == ">");
  CHECK(m.input == std::set<std::string>{"0", "1"});
  REQUIRE(m.delta.size() == 2);
  CHECK(m.delta[1] == LbaTransition{"q2", "0", "q3", "1", 0});
  auto again = parse_lba(print_lba(m));
  CHECK(again.states == m.states);
  CHECK(again.delta == m.delta);

  // the declared initial state is moved to the front
  CHECK(parse_lba("states a b\ninitial b\ntape < >\n").states == std::vector<std::string>{"b", "a"});

  const std::string head = "states q\ninitial q\ntape < > 0\ninput 0\n";
  CHECK_THROWS_AS(parse_lba("states q\ntape < >\n"), ParseError);
  CHECK_THROWS_AS(parse_lba("states q\ninitial p\ntape < >\n"), ParseError);
  CHECK_THROWS_AS(parse_lba(head + "bogus x\n"), ParseError);
  CHECK_THROWS_AS(parse_lba(head + "delta q 0 q 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_lba(head + "delta q 0 -> q 0 right\n"), ParseError);
  CHECK_THROWS_AS(parse_lba(head + "delta q < -> q < -1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba(head + "delta q > -> q > +1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba(head + "delta q < -> q 0 +1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba(head + "delta q 0 -> q > 0\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba(head + "delta q 0 -> r 0 0\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba(head + "delta q 0 -> q 0 2\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba("states q\ninitial q\ntape <\n"), PreconditionError);
  CHECK_THROWS_AS(parse_lba("states q\ninitial q\nfinal r\ntape < >\n"), PreconditionError);

  CHECK_THROWS_AS(lba_to_pfmc(m, words("0 >")), PreconditionError);
  CHECK_THROWS_AS(lba_to_pfmc(m, words("< 2 >")), PreconditionError);
  CHECK_THROWS_AS(lba_to_pfmc(m, words("< < >")), PreconditionError);
}

TEST_CASE("lba simulation") {
  auto zeros = parse_lba(fixture("lba/all_zeros.lba"));
  CHECK(lba_accepts(zeros, words("< >")));
  CHECK(lba_accepts(zeros, words("< 0 0 0 >")));
  CHECK_FALSE(lba_accepts(zeros, words("< 0 1 0 >")));
  auto once = parse_lba(fixture("lba/rewrite_once.lba"));
  CHECK(lba_accepts(once, words("< 0 1 >")));
  CHECK_FALSE(lba_accepts(once, words("< 1 0 >")));
  CHECK_FALSE(lba_accepts(once, words("< >")));
}

TEST_CASE("lba encoding grammar") {
  auto m = parse_lba(fixture("lba/accept_all.lba"));
  auto inst = lba_to_pfmc(m, words("< >"));
  CHECK(inst.word == std::vector<std::string>{"a"});
  CHECK(check_epsilon_free(inst.grammar));
  CHECK_FALSE(check_acyclic(inst.grammar));
  for (const char* x : kLbaNonterminals) CHECK(inst.grammar.is_nonterminal(x));
  CHECK(default_method(inst.grammar) == Method::rotate);
}

TEST_CASE("lba reduction agrees with simulation") {
  struct Case {
    const char* machine;
    const char* input;
  };
  const Case cases[] = {
      {"accept_all.lba", "< >"},       {"accept_empty.lba", "< >"},   {"accept_empty.lba", "< 0 >"},
      {"rewrite_once.lba", "< 0 >"},   {"rewrite_once.lba", "< 1 >"}, {"all_zeros.lba", "< 0 >"},
      {"all_zeros.lba", "< 1 >"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.machine);
    CAPTURE(c.input);
    auto m = parse_lba(fixture(std::string("lba/") + c.machine));
    auto x = words(c.input);
    auto inst = lba_to_pfmc(m, x);
    auto ans = solve(inst);
    CHECK(ans.method == Method::rotate);
    CHECK(ans.verdict != Verdict::unknown);
    CHECK((ans.verdict == Verdict::satisfiable) == lba_accepts(m, x));
    if (ans.witness) CHECK(holds(inst, *ans.witness));
  }
}

TEST_CASE("lba without final states rejects") {
  auto m = parse_lba(fixture("lba/accept_all.lba"));
  m.finals.clear();
  CHECK_FALSE(lba_accepts(m, words("< >")));
  CHECK(solve(lba_to_pfmc(m, words("< >"))).verdict == Verdict::unsatisfiable);
}
