#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

#include "pfmc/dtd.hpp"
#include "pfmc/pdl.hpp"
#include "pfmc/tree.hpp"

namespace pfmc {

// ---------------------------------------------------------------- streams

struct Tag {
  std::string name;
  bool open = true;
  friend bool operator==(const Tag&, const Tag&) = default;
};
using StreamWord = std::vector<Tag>;

inline constexpr const char* kStreamRoot = "r";

/// <r> stream(t) </r>, where stream(f(t1..tm)) = <f> stream(t1)..stream(tm) </f>.
StreamWord stream_encode(const Tree& t);
/// Left inverse of stream_encode; throws ParseError on malformed input.
Tree stream_decode(const StreamWord& w);
/// Tags separated by single spaces, e.g. "<r> <p> </p> </r>".
std::string stream_text(const StreamWord& w);
StreamWord parse_stream_text(std::string_view s);

// ---------------------------------------------------------------- automata

/// Two-way alternating parity word automaton over the tags of a fixed
/// symbol list. Letters: 0 = <r>, 1 = </r>, 2+2k = <symbols[k]>,
/// 3+2k = </symbols[k]>.
class Apwa {
 public:
  /// Node of a positive boolean formula over (state, direction) pairs.
  struct Formula {
    enum class Kind { top, bot, atom, conj, disj };
    Kind kind = Kind::bot;
    int state = -1;  // atom
    int dir = 0;     // atom: -1, 0 or +1
    int lhs = -1;    // conj / disj operands (formula ids)
    int rhs = -1;
  };

  explicit Apwa(std::vector<std::string> symbols = {});

  const std::vector<std::string>& symbols() const { return symbols_; }
  int letters() const { return 2 + 2 * static_cast<int>(symbols_.size()); }
  int letter(const Tag& t) const;  // -1 if foreign
  Tag tag(int letter) const;
  static bool is_open(int letter) { return letter % 2 == 0; }
  /// Symbol index of a letter, -1 for the wrapper tags.
  static int symbol_of(int letter) { return letter < 2 ? -1 : (letter - 2) / 2; }

  int size() const { return static_cast<int>(color_.size()); }
  int add_state(int color);
  int color(int q) const { return color_[q]; }
  int initial() const { return initial_; }
  void set_initial(int q) { initial_ = q; }
  const std::set<int>& continuation() const { return continuation_; }
  void mark_continuation(int q) { continuation_.insert(q); }

  // formula construction; ids index into this automaton's pool
  int top() const { return 0; }
  int bot() const { return 1; }
  int atom(int q, int dir);
  int conj(int a, int b);
  int disj(int a, int b);
  const Formula& formula(int id) const { return pool_[id]; }
  std::size_t formula_count() const { return pool_.size(); }

  int delta(int q, int letter) const { return delta_[q][letter]; }
  void set_delta(int q, int letter, int f) { delta_[q][letter] = f; }
  void set_delta_all(int q, int f);

  /// Copies b's states and formulas; returns the state offset.
  int absorb(const Apwa& b);
  std::string describe() const;

 private:
  int intern(const Formula& f);

  std::vector<std::string> symbols_;
  std::vector<Formula> pool_;
  std::map<std::tuple<int, int, int, int>, int> index_;
  std::vector<std::vector<int>> delta_;
  std::vector<int> color_;
  std::set<int> continuation_;
  int initial_ = -1;
};

/// Automaton for a node formula, started at a node's opening tag.
/// Depth bound n: trees of depth at most n.
Apwa compile_formula(const pdl::NodeFormula& f, const std::vector<std::string>& symbols, int n);
/// Automaton for a path formula whose single continuation state is
/// visited exactly on the opening tags related to the start.
Apwa compile_path(const pdl::PathFormula& p, const std::vector<std::string>& symbols, int n);
/// Prefixes a step from <r> to the first opening tag.
Apwa at_root(const Apwa& a);
/// Accepts the encodings of L(d); n bounds the depth.
Apwa compile_dtd(const Dtd& d, int n);
std::vector<std::string> dtd_symbols(const Dtd& d);

Apwa dual(const Apwa& a);
Apwa conjoin(const Apwa& a, const Apwa& b);
Apwa disjoin(const Apwa& a, const Apwa& b);

/// Acceptance game solved by attractor decomposition, started at `start`.
bool accepts(const Apwa& a, const StreamWord& w, std::size_t start = 0);

struct EmptinessResult {
  bool empty = true;
  std::optional<StreamWord> witness;
  std::size_t summaries = 0;  // distinct prefix summaries explored
};

/// Emptiness over framed words <r> u </r> with u over the symbol tags.
EmptinessResult check_emptiness(const Apwa& a, std::size_t max_summaries = 0);
/// Same, but only prefixes of encodings of trees of `guide` are explored.
/// Agrees with the unguided search whenever a accepts only such encodings,
/// e.g. for a conjunction with compile_dtd(guide, n).
EmptinessResult check_emptiness(const Apwa& a, const Dtd& guide, std::size_t max_summaries = 0);
bool is_empty(const Apwa& a);

// ---------------------------------------------------------------- games

/// Parity game, min-parity: player 0 wins plays whose least recurring
/// priority is even. A player with no move loses.
struct ParityGame {
  std::vector<int> owner;     // 0 or 1
  std::vector<int> priority;  // >= 0
  std::vector<std::vector<int>> succ;

  int add_vertex(int owner, int priority);
  /// Winner (0 or 1) of every vertex.
  std::vector<int> solve() const;
};

}  // namespace pfmc
