#pragma once

#include <array>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pfmc/solver.hpp"

namespace pfmc {

// ---------------------------------------------------------------- 3SAT

/// A literal is a nonzero variable index, negative when negated.
struct SatInstance {
  int n = 0;
  std::vector<std::array<int, 3>> clauses;

  void validate() const;
};

/// DIMACS CNF; clauses shorter than three literals are padded by
/// repeating their last literal.
SatInstance parse_dimacs(std::string_view text);
std::string print_dimacs(const SatInstance& s);

/// Comb grammar S -> S F | S T | F | T over w = a^n. The F/T child of the
/// k-th S from the root encodes variable k.
PfmcInstance sat3_to_pfmc(const SatInstance& s);
/// Valuation read off a comb tree: entry k-1 is the value of variable k.
std::vector<bool> comb_valuation(const Tree& t);

bool satisfies(const SatInstance& s, const std::vector<bool>& valuation);
/// Exhaustive search over valuations.
std::optional<std::vector<bool>> brute_force_sat(const SatInstance& s);
SatInstance random_3sat(std::mt19937& rng, int n, int clauses);

// ---------------------------------------------------------------- LBA

struct LbaTransition {
  std::string state, read, next, write;
  int move = 0;  // -1, 0 or +1
  friend bool operator==(const LbaTransition&, const LbaTransition&) = default;
};

/// Linear bounded automaton. The first state is initial; the first two
/// tape symbols are the left and right endmarkers.
struct LbaSpec {
  std::vector<std::string> states;
  std::set<std::string> finals;
  std::vector<std::string> tape;
  std::set<std::string> input;
  std::vector<LbaTransition> delta;

  const std::string& left_marker() const { return tape.at(0); }
  const std::string& right_marker() const { return tape.at(1); }
  /// Checks declarations and that no move erases or crosses an endmarker.
  void validate() const;
};

/// Line format: `states`, `initial`, `final`, `tape`, `input` declarations
/// and `delta q a -> q' a' d` lines with d in {-1, 0, +1}; `#` comments.
LbaSpec parse_lba(std::string_view text);
std::string print_lba(const LbaSpec& m);

/// Does the machine reach a final state from the initial configuration on x?
/// Breadth-first search of the configuration graph.
bool lba_accepts(const LbaSpec& m, const std::vector<std::string>& x);

/// Nonterminal names of the linear encoding.
inline constexpr const char* kLbaNonterminals[] = {"S", "H", "Hbar", "C", "Cbar", "A", "Abar"};

/// Fixed unary-chain grammar over w = a, with a formula whose models are
/// the encodings of accepting runs of m on x.
PfmcInstance lba_to_pfmc(const LbaSpec& m, const std::vector<std::string>& x);

}  // namespace pfmc
