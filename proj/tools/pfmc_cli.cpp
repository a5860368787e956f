// pfmc: command-line front end for parse forest model checking.
//
// Exit codes: 0 satisfiable / success, 1 unsatisfiable, 2 unknown,
// 3 usage errors, 4 unreadable or malformed input, 5 failed preconditions,
// 6 any other failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "pfmc/error.hpp"
#include "pfmc/forest.hpp"
#include "pfmc/reductions.hpp"
#include "pfmc/solver.hpp"

using namespace pfmc;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kSat = 0, kUnsat = 1, kUnknown = 2, kUsage = 3, kInput = 4, kPrecondition = 5, kOther = 6 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::satisfiable: return kSat;
    case Verdict::unsatisfiable: return kUnsat;
    case Verdict::unknown: return kUnknown;
  }
  return kUnknown;
}

// Options shared by the subcommands that take an instance.
struct InstanceArgs {
  std::string grammar, word, formula_file, expr;
  std::string method = "auto";
  std::size_t budget = kDefaultBudget;
  bool json = false;
  CLI::Option* budget_opt = nullptr;

  void attach(CLI::App* app, bool with_formula = true) {
    app->add_option("--grammar", grammar, "grammar file")->required()->check(CLI::ExistingFile);
    app->add_option("--word", word, "whitespace-separated terminals")->required();
    if (with_formula) {
      auto* f = app->add_option("--formula", formula_file, "formula file")->check(CLI::ExistingFile);
      auto* e = app->add_option("--expr", expr, "inline formula");
      f->excludes(e);
      e->excludes(f);
    }
  }

  void attach_solver(CLI::App* app) {
    app->add_option("--method", method, "auto, enumerate, dtd or rotate")
        ->check(CLI::IsMember({"auto", "enumerate", "dtd", "rotate"}));
    budget_opt = app->add_option("--budget", budget, "enumeration budget (trees)");
    app->add_flag("--json", json, "machine-readable output");
  }

  pdl::NodeFormula formula() const {
    if (!formula_file.empty()) return pdl::parse_node_formula(read_file(formula_file));
    if (!expr.empty()) return pdl::parse_node_formula(expr);
    throw CLI::RequiredError("--formula or --expr");
  }

  PfmcInstance instance(bool with_formula = true) const {
    PfmcInstance inst;
    inst.grammar = parse_grammar_text(read_file(grammar));
    inst.word = tokens(word);
    inst.formula = with_formula ? formula() : pdl::top();
    return inst;
  }
};

json stats_json(const SolveStats& s) {
  return {{"trees_visited", s.trees_visited}, {"truncated", s.truncated},
          {"forest_states", s.forest_states}, {"dtd_symbols", s.dtd_symbols},
          {"automaton_states", s.automaton_states}, {"summaries", s.summaries},
          {"elapsed_ms", s.elapsed_ms}};
}

int cmd_check(const InstanceArgs& args) {
  PfmcInstance inst = args.instance();
  SolveOptions opts;
  if (args.method != "auto") opts.method = parse_method(args.method);
  opts.budget = args.budget;
  PfmcAnswer ans = solve(inst, opts);
  if (args.json) {
    json j{{"verdict", verdict_name(ans.verdict)},
           {"method", method_name(ans.method)},
           {"witness", ans.witness ? json(to_sexpr(*ans.witness)) : json(nullptr)},
           {"stats", stats_json(ans.stats)}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << verdict_name(ans.verdict) << " (" << method_name(ans.method) << ")\n";
    if (ans.witness) std::cout << to_sexpr(*ans.witness) << '\n';
    if (ans.stats.truncated) std::cout << "budget exhausted after " << ans.stats.trees_visited << " trees\n";
  }
  return verdict_exit(ans.verdict);
}

// Trees of the forest that satisfy the formula, in enumeration order.
int cmd_filter(const InstanceArgs& args, std::size_t limit) {
  PfmcInstance inst = args.instance();
  ForestAutomaton fa = trim(build_forest_automaton(inst.grammar, inst.word));
  bool finite = !count_trees(fa).infinite;
  std::size_t budget = finite && !*args.budget_opt ? std::numeric_limits<std::size_t>::max() : args.budget;
  FilterResult r = filter_forest(inst, budget, limit);
  if (args.json) {
    json trees = json::array();
    for (const auto& t : r.trees) trees.push_back(to_sexpr(t));
    std::cout << json{{"trees", trees}, {"visited", r.visited}, {"truncated", r.truncated}}.dump(2) << '\n';
  } else {
    for (const auto& t : r.trees) std::cout << to_sexpr(t) << '\n';
    if (r.truncated) std::cerr << "budget exhausted after " << r.visited << " trees\n";
  }
  if (!r.trees.empty()) return kSat;
  return r.truncated ? kUnknown : kUnsat;
}

int cmd_count(const InstanceArgs& args) {
  PfmcInstance inst = args.instance(false);
  TreeCount c = count_trees(trim(build_forest_automaton(inst.grammar, inst.word)));
  std::cout << c.str() << '\n';
  return kSat;
}

int cmd_classify(const std::string& formula_file, const std::string& expr) {
  pdl::Fragment fr = !formula_file.empty() ? pdl::classify_fragment(pdl::parse_node_formula(read_file(formula_file)))
                                           : pdl::classify_fragment(pdl::parse_formula_text(expr));
  std::cout << fr.name() << ", " << (fr.downward ? "downward" : "not downward") << '\n';
  return kSat;
}

int cmd_recognize(const InstanceArgs& args, const std::string& root, const std::string& props_arg) {
  pdl::NodeFormula f = args.formula();
  std::vector<std::string> word = tokens(args.word);
  std::vector<std::string> props;
  if (!props_arg.empty()) {
    props = tokens(props_arg);
  } else {
    std::set<std::string> all = pdl::atoms(f);
    all.insert(word.begin(), word.end());
    all.insert(root);
    props.assign(all.begin(), all.end());
  }
  bool ok = recognize(f, word, props, root);
  std::cout << (ok ? "recognized" : "not recognized") << '\n';
  return ok ? kSat : kUnsat;
}

void write_instance(const PfmcInstance& inst, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::path d(dir);
  write_file(d / "grammar.cfg", print_grammar(inst.grammar));
  std::string w;
  for (const auto& t : inst.word) w += (w.empty() ? "" : " ") + t;
  write_file(d / "word.txt", w + '\n');
  write_file(d / "formula.pdl", pdl::print(inst.formula) + '\n');
  std::cout << "wrote " << (d / "grammar.cfg").string() << ", " << (d / "word.txt").string() << ", "
            << (d / "formula.pdl").string() << '\n';
}

int cmd_oracle(const InstanceArgs& args, std::size_t bound) {
  OracleResult r = oracle_bruteforce(args.instance(), bound);
  if (args.json) {
    json j{{"verdict", oracle_name(r.verdict)},
           {"witness", r.witness ? json(to_sexpr(*r.witness)) : json(nullptr)},
           {"trees", r.trees},
           {"complete", r.complete}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << oracle_name(r.verdict) << '\n';
    if (r.witness) std::cout << to_sexpr(*r.witness) << '\n';
  }
  switch (r.verdict) {
    case OracleVerdict::satisfiable: return kSat;
    case OracleVerdict::unsatisfiable_within_bound: return kUnsat;
    case OracleVerdict::unknown: return kUnknown;
  }
  return kUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parse forest model checking: does some parse tree of a word satisfy a PDL formula?"};
  app.require_subcommand(1);

  InstanceArgs check_args, filter_args, count_args, recog_args, oracle_args;
  auto* check = app.add_subcommand("check", "decide satisfiability; exit 0 sat, 1 unsat, 2 unknown");
  check_args.attach(check);
  check_args.attach_solver(check);

  std::size_t limit = 0;
  auto* filter = app.add_subcommand("filter", "print the parse trees that satisfy the formula");
  filter_args.attach(filter);
  filter_args.attach_solver(filter);
  filter->add_option("--limit", limit, "stop after this many trees (0: no limit)");

  auto* count = app.add_subcommand("count", "number of parse trees, or inf");
  count_args.attach(count, false);

  std::string cls_file, cls_expr;
  auto* classify = app.add_subcommand("classify", "syntactic fragment of a formula");
  auto* cf = classify->add_option("--formula", cls_file, "formula file")->check(CLI::ExistingFile);
  auto* ce = classify->add_option("--expr", cls_expr, "inline node or path formula");
  cf->excludes(ce);
  ce->excludes(cf);

  std::string root, props;
  auto* recog = app.add_subcommand("recognize", "is there a tree with this yield and root satisfying the formula");
  recog->add_option("--word", recog_args.word, "whitespace-separated leaf labels")->required();
  auto* rf = recog->add_option("--formula", recog_args.formula_file, "formula file")->check(CLI::ExistingFile);
  auto* re = recog->add_option("--expr", recog_args.expr, "inline formula");
  rf->excludes(re);
  re->excludes(rf);
  recog->add_option("--root", root, "root label")->required();
  recog->add_option("--props", props, "propositions (default: atoms, word and root)");

  auto* gen = app.add_subcommand("gen", "write the instance of a hardness reduction");
  gen->require_subcommand(1);
  std::string dimacs, machine, input, out_dir;
  auto* gen_sat = gen->add_subcommand("3sat", "comb-grammar instance of a 3CNF formula");
  gen_sat->add_option("--dimacs", dimacs, "DIMACS CNF file")->required()->check(CLI::ExistingFile);
  gen_sat->add_option("-o,--out", out_dir, "output directory")->required();
  auto* gen_lba = gen->add_subcommand("lba", "instance encoding the runs of a linear bounded automaton");
  gen_lba->add_option("--machine", machine, "machine file")->required()->check(CLI::ExistingFile);
  gen_lba->add_option("--input", input, "tape contents including the endmarkers")->required();
  gen_lba->add_option("-o,--out", out_dir, "output directory")->required();

  std::size_t bound = 0;
  auto* oracle = app.add_subcommand("oracle", "check every parse tree up to a size bound");
  oracle_args.attach(oracle);
  oracle->add_flag("--json", oracle_args.json, "machine-readable output");
  oracle->add_option("--size-bound", bound, "largest tree size (nodes)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(check_args);
    if (filter->parsed()) return cmd_filter(filter_args, limit);
    if (count->parsed()) return cmd_count(count_args);
    if (classify->parsed()) {
      if (cls_file.empty() && cls_expr.empty()) throw CLI::RequiredError("--formula or --expr");
      return cmd_classify(cls_file, cls_expr);
    }
    if (recog->parsed()) return cmd_recognize(recog_args, root, props);
    if (gen_sat->parsed()) {
      write_instance(sat3_to_pfmc(parse_dimacs(read_file(dimacs))), out_dir);
      return kSat;
    }
    if (gen_lba->parsed()) {
      write_instance(lba_to_pfmc(parse_lba(read_file(machine)), tokens(input)), out_dir);
      return kSat;
    }
    if (oracle->parsed()) return cmd_oracle(oracle_args, bound);
  } catch (const CLI::Error& e) {
    std::cerr << "pfmc: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "pfmc: " << e.what() << '\n';
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "pfmc: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "pfmc: " << e.what() << '\n';
    return kOther;
  }
  return kUsage;
}
