#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfmc/grammar.hpp"
#include "pfmc/tree.hpp"

namespace pfmc {

/// A state (i, X, j): symbol X spans the input between cuts i and j.
struct ForestState {
  int i = 0;
  std::string x;
  int j = 0;

  std::string name() const;         // "i_X_j"
  std::string barred_name() const;  // "bar_i_X_j"
  friend bool operator==(const ForestState&, const ForestState&) = default;
  friend auto operator<=>(const ForestState&, const ForestState&) = default;
};

/// Inverse of ForestState::name / barred_name.
std::optional<ForestState> parse_state_name(const std::string& s, bool* barred = nullptr);

struct ForestRule {
  int lhs;                    // state index
  std::string label;          // output label
  std::vector<int> children;  // state indices
};

enum class ForestFlavor { plain, trimmed, localized };

/// Bottom-up tree automaton whose language is a parse forest.
class ForestAutomaton {
 public:
  std::vector<ForestState> states;
  std::vector<ForestRule> rules;
  int initial = -1;  // -1: empty language
  ForestFlavor flavor = ForestFlavor::plain;
  std::vector<std::string> word;

  int find(const ForestState& q) const;
  int add_state(const ForestState& q);
  bool empty() const { return initial < 0; }
  /// Rules indexed by their lhs state.
  std::vector<std::vector<int>> rules_by_lhs() const;
  /// True if some state depends on itself through rule children.
  bool has_cycle() const;

 private:
  std::map<ForestState, int> index_;
};

/// Productive part of the Bar-Hillel product of g with w.
ForestAutomaton build_forest_automaton(const Cfg& g, const std::vector<std::string>& w);
ForestAutomaton trim(const ForestAutomaton& a);
/// Each rule outputs its own lhs state name.
ForestAutomaton localize(const ForestAutomaton& a);

struct TreeCount {
  bool infinite = false;
  boost::multiprecision::cpp_int value = 0;
  std::string str() const;
};

TreeCount count_trees(const ForestAutomaton& a);

/// Streams L(a) by increasing node count, then by Tree ordering.
class TreeEnumerator {
 public:
  TreeEnumerator(const ForestAutomaton& a, std::size_t budget);

  /// Next tree, or nothing when the language or the budget is exhausted.
  std::optional<Tree> next();
  /// True when the budget stopped the stream before the language ended.
  bool truncated() const { return truncated_; }
  std::size_t emitted() const { return emitted_; }

 private:
  const std::vector<Tree>& trees_of(int q, std::size_t size);
  void combine(const ForestRule& r, std::size_t k, std::size_t remaining,
               std::vector<const Tree*>& picked, std::vector<Tree>& out);

  const ForestAutomaton& a_;
  std::size_t budget_;
  std::vector<std::vector<int>> by_lhs_;
  std::map<std::pair<int, std::size_t>, std::vector<Tree>> memo_;
  TreeCount total_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::size_t emitted_ = 0;
  bool truncated_ = false;
  bool done_ = false;
};

std::vector<Tree> enumerate_trees(const ForestAutomaton& a, std::size_t budget,
                                  bool* truncated = nullptr);

bool accepts_tree(const ForestAutomaton& a, const Tree& t);

/// The run of `a` on t, as a tree of state names; nothing if t is rejected.
std::optional<Tree> annotate_run(const ForestAutomaton& a, const Tree& t);

/// Replaces state-name labels by the symbol they carry.
Tree delocalize(const Tree& t);

}  // namespace pfmc
