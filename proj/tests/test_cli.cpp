// Runs the pfmc executable and checks exit codes and output.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "pfmc/solver.hpp"
#include "support.hpp"

using namespace pfmc;
using namespace testing_support;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(PFMC_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  Run r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const std::string& name) { return std::string(PFMC_FIXTURES) + "/" + name; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

const std::string kDangling = "--grammar " + fx("dangling_else.cfg") +
                              " --word 'if true then if true then skip else skip' --formula " +
                              fx("dangling_else.pdl");

}  // namespace

TEST_CASE("check and filter on the dangling-else fixture") {
  Run c = run("check " + kDangling);
  CHECK(c.code == 0);
  CHECK(lines(c.out).at(0) == "satisfiable (enumerate)");
  Run f = run("filter " + kDangling);
  CHECK(f.code == 0);
  REQUIRE(lines(f.out).size() == 1);
  CHECK(lines(f.out)[0] ==
        "(S (st if (C (ct true)) then (S (se if (C (ct true)) then (S (ss skip)) else (S (ss skip))))))");
  Run all = run("filter --expr true --grammar " + fx("dangling_else.cfg") +
                " --word 'if true then if true then skip else skip'");
  CHECK(lines(all.out).size() == 2);
  CHECK(run("count --grammar " + fx("dangling_else.cfg") + " --word 'if true then if true then skip else skip'").out ==
        "2\n");
  for (const char* m : {"enumerate", "dtd", "rotate"}) CHECK(run("check --method " + std::string(m) + " " + kDangling).code == 0);
}

TEST_CASE("json output mirrors the result record") {
  Run c = run("check --json " + kDangling);
  CHECK(c.code == 0);
  CHECK(c.out.find("\"verdict\": \"satisfiable\"") != std::string::npos);
  CHECK(c.out.find("\"method\": \"enumerate\"") != std::string::npos);
  CHECK(c.out.find("\"witness\": \"(S (st if") != std::string::npos);
  CHECK(c.out.find("\"stats\"") != std::string::npos);
  CHECK(c.out.find("\"verdict\"") < c.out.find("\"method\""));
}

TEST_CASE("exit codes follow the verdicts on the fixture corpus") {
  Cfg clitics = parse_grammar_text(fixture("clitics.cfg"));
  pdl::NodeFormula f = pdl::parse_node_formula(fixture("clitics.pdl"));
  for (const char* w : {"la philosophe le lui demande", "demande", "elle le lui demande de reflechir"}) {
    CAPTURE(w);
    Verdict v = solve({clitics, words(w), f}).verdict;
    Run r = run("check --grammar " + fx("clitics.cfg") + " --word '" + w + "' --formula " + fx("clitics.pdl"));
    CHECK(r.code == (v == Verdict::satisfiable ? 0 : 1));
  }
  CHECK(run("check --grammar " + fx("clitics.cfg") + " --word demande --formula " + fx("clitics.pdl")).code == 1);

  std::string unit = "/tmp/pfmc_cli_unit.cfg";
  std::ofstream(unit) << "axiom S ; S -> S | \"a\" ;\n";
  CHECK(run("count --grammar " + unit + " --word a").out == "inf\n");
  CHECK(run("check --grammar " + unit + " --word a --expr '<down;down;down> a'").code == 0);
  CHECK(run("check --grammar " + unit + " --word a --expr a").code == 1);
  CHECK(run("check --method enumerate --budget 5 --grammar " + unit + " --word a --expr a").code == 2);
  CHECK(run("filter --budget 5 --grammar " + unit + " --word a --expr a").code == 2);
  CHECK(run("oracle --size-bound 4 --grammar " + unit + " --word a --expr '<down;down;down> a'").code == 0);
  CHECK(run("oracle --size-bound 3 --grammar " + unit + " --word a --expr '<down;down;down> a'").code == 2);
}

TEST_CASE("classify and recognize") {
  CHECK(run("classify --expr dfnext").out == "full, not downward\n");
  CHECK(run("classify --expr '<down*> a'").out == "cr, downward\n");
  CHECK(run("classify --expr '<(down;a?)*> b'").out == "cp, downward\n");
  CHECK(run("recognize --expr '<down;down> s' --word 'a b' --root s").code == 0);
  CHECK(run("recognize --expr a --word 'a b' --root s").code == 1);
}

TEST_CASE("generated reduction instances solve like the library") {
  auto dir = std::filesystem::temp_directory_path() / "pfmc_cli_gen";
  std::filesystem::remove_all(dir);
  std::ofstream(dir.string() + ".cnf") << "p cnf 2 2\n1 2 0\n-1 -1 -1 0\n";
  REQUIRE(run("gen 3sat --dimacs " + dir.string() + ".cnf -o " + dir.string()).code == 0);
  auto inst = [&](const std::string& d) {
    return "--grammar " + d + "/grammar.cfg --word '" + read_file(d + "/word.txt") + "' --formula " + d + "/formula.pdl";
  };
  Run r = run("check " + inst(dir.string()));
  CHECK(r.code == 0);
  CHECK(lines(r.out).at(1).find("(F a)") != std::string::npos);

  auto ldir = dir.string() + "_lba";
  REQUIRE(run("gen lba --machine " + fx("lba/accept_empty.lba") + " --input '< 0 >' -o " + ldir).code == 0);
  CHECK(run("check " + inst(ldir)).code == 1);
  REQUIRE(run("gen lba --machine " + fx("lba/accept_empty.lba") + " --input '< >' -o " + ldir).code == 0);
  CHECK(run("check " + inst(ldir)).code == 0);
}

TEST_CASE("errors exit with codes of at least three") {
  CHECK(run("").code == 3);
  CHECK(run("check --word a --expr true").code == 3);
  CHECK(run("check --grammar " + fx("dangling_else.cfg") + " --word if").code == 3);
  CHECK(run("check --grammar " + fx("dangling_else.cfg") + " --word if --expr true --formula " +
            fx("dangling_else.pdl"))
            .code == 3);
  CHECK(run("check --grammar " + fx("dangling_else.cfg") + " --word if --expr '<down'").code == 4);
  CHECK(run("check --grammar " + fx("dangling_else.pdl") + " --word if --expr true").code == 4);
  CHECK(run("check --method bogus " + kDangling).code == 3);
  std::string cyc = "/tmp/pfmc_cli_cyc.cfg";
  std::ofstream(cyc) << "axiom S ; S -> S | \"a\" | ;\n";
  CHECK(run("check --method rotate --grammar " + cyc + " --word a --expr true").code == 5);
  CHECK(run("gen lba --machine " + fx("lba/accept_empty.lba") + " --input '0 >' -o /tmp/pfmc_cli_bad").code == 5);
  CHECK(run("recognize --expr a --word 'a eps' --root s").code == 5);
}

TEST_CASE("output is deterministic") {
  for (const std::string& args :
       {"check --json " + kDangling, "filter --expr true --grammar " + fx("clitics.cfg") + " --word 'la philosophe le lui demande'"}) {
    Run a = run(args), b = run(args);
    CHECK(a.code == b.code);
    std::string x = a.out, y = b.out;
    // timings differ between runs
    auto strip = [](std::string s) {
      auto k = s.find("\"elapsed_ms\"");
      if (k != std::string::npos) s.erase(k, s.find('\n', k) - k);
      return s;
    };
    CHECK(strip(x) == strip(y));
  }
}
