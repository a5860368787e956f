#pragma once

#include <boost/dynamic_bitset.hpp>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pfmc/tree.hpp"

namespace pfmc::pdl {

struct NodeExpr;
struct PathExpr;
using NodeFormula = std::shared_ptr<const NodeExpr>;
using PathFormula = std::shared_ptr<const PathExpr>;

enum class NodeKind { atom, top, negation, conjunction, diamond };
enum class PathKind { down, right, sequence, choice, star, inverse, test };

// Only the core constructors exist; sugar is expanded by the builders below.
struct NodeExpr {
  NodeKind kind;
  std::string atom;   // atom
  NodeFormula lhs;    // negation, conjunction, diamond (target)
  NodeFormula rhs;    // conjunction
  PathFormula path;   // diamond
};

struct PathExpr {
  PathKind kind;
  PathFormula lhs;    // sequence, choice, star, inverse
  PathFormula rhs;    // sequence, choice
  NodeFormula test;   // test
};

// Core builders.
NodeFormula atom(std::string name);
NodeFormula top();
NodeFormula neg(NodeFormula f);
NodeFormula conj(NodeFormula a, NodeFormula b);
NodeFormula diamond(PathFormula p, NodeFormula f);

PathFormula down();
PathFormula right();
PathFormula seq(PathFormula a, PathFormula b);
PathFormula choice(PathFormula a, PathFormula b);
PathFormula star(PathFormula p);
PathFormula inverse(PathFormula p);
PathFormula test(NodeFormula f);

// Derived forms.
NodeFormula bot();
NodeFormula disj(NodeFormula a, NodeFormula b);
NodeFormula implies(NodeFormula a, NodeFormula b);
NodeFormula iff(NodeFormula a, NodeFormula b);
NodeFormula box(PathFormula p, NodeFormula f);
NodeFormula conj_all(const std::vector<NodeFormula>& fs);  // empty: top
NodeFormula disj_all(const std::vector<NodeFormula>& fs);  // empty: bot
PathFormula up();
PathFormula left();
PathFormula plus(PathFormula p);  // p;p*
PathFormula power(PathFormula p, int k);  // k >= 1
PathFormula seq_all(const std::vector<PathFormula>& ps);
PathFormula choice_all(const std::vector<PathFormula>& ps);

// Navigation macros.
NodeFormula root_macro();   // !<up>true
NodeFormula leaf_macro();   // !<down>true
NodeFormula first_macro();  // !<left>true
NodeFormula last_macro();   // !<right>true
PathFormula firstchild_macro();  // down;first?
PathFormula dfnext_macro();      // (last?;up)*;right;(down;first?)*

using Formula = std::variant<NodeFormula, PathFormula>;

/// Canonical concrete syntax over core constructors; re-parseable.
std::string print(const NodeFormula& f);
std::string print(const PathFormula& p);

std::size_t size(const NodeFormula& f);
std::size_t size(const PathFormula& p);

std::set<std::string> atoms(const NodeFormula& f);
std::set<std::string> atoms(const PathFormula& p);

bool equal(const NodeFormula& a, const NodeFormula& b);
bool equal(const PathFormula& a, const PathFormula& b);

/// Macro environment for the parser. Built-ins are always present.
using MacroEnv = std::map<std::string, Formula>;

/// Parses a single expression (node or path) with the given macros.
Formula parse_formula_text(std::string_view text, const MacroEnv& defs = {});
/// Parses `let` definitions followed by one node formula.
NodeFormula parse_node_formula(std::string_view text, const MacroEnv& defs = {});
PathFormula parse_path_formula(std::string_view text, const MacroEnv& defs = {});

/// Homomorphic substitution: atoms and the two atomic paths are replaced.
/// Atoms absent from the map are kept; inverse images follow automatically.
struct Substitution {
  std::map<std::string, NodeFormula> atoms;
  PathFormula down;   // null keeps the original step
  PathFormula right;  // null keeps the original step
  bool require_total = false;  // missing atom is an error
};
NodeFormula substitute(const NodeFormula& f, const Substitution& s);
PathFormula substitute(const PathFormula& p, const Substitution& s);

/// Pushes inverses down to the atomic steps.
PathFormula push_inverse(const PathFormula& p);
NodeFormula push_inverse(const NodeFormula& f);

// ---------------------------------------------------------------------------
// Interpretation over one tree.

/// Preorder-indexed view of a tree; index 0 is the root.
class IndexedTree {
 public:
  explicit IndexedTree(const Tree& t);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t u) const { return labels_[u]; }
  int parent(std::size_t u) const { return parent_[u]; }
  int next_sibling(std::size_t u) const { return next_[u]; }
  int prev_sibling(std::size_t u) const { return prev_[u]; }
  const std::vector<int>& children(std::size_t u) const { return children_[u]; }
  /// Dewey address (0-based child indices) of node u.
  std::vector<int> address(std::size_t u) const;

 private:
  void build(const Tree& t, int parent);
  std::vector<std::string> labels_;
  std::vector<int> parent_, next_, prev_;
  std::vector<std::vector<int>> children_;
};

using NodeSet = boost::dynamic_bitset<>;

/// Binary relation as successor rows: rows[u] is the image of u.
struct NodeRelation {
  std::vector<NodeSet> rows;
  explicit NodeRelation(std::size_t n = 0) : rows(n, NodeSet(n)) {}
  std::size_t size() const noexcept { return rows.size(); }
  bool contains(std::size_t u, std::size_t v) const { return rows[u][v]; }
  NodeRelation transpose() const;
  friend bool operator==(const NodeRelation&, const NodeRelation&) = default;
};

struct EvalOptions {
  const Labeling* labeling = nullptr;
  /// Atom names accepted; null accepts every atom.
  const std::set<std::string>* known_props = nullptr;
  /// Unknown atoms evaluate to the empty set instead of raising.
  bool lenient = false;
};

NodeSet evaluate(const IndexedTree& t, const NodeFormula& f, const EvalOptions& opts = {});
NodeRelation evaluate(const IndexedTree& t, const PathFormula& p, const EvalOptions& opts = {});
NodeSet evaluate(const Tree& t, const NodeFormula& f, const EvalOptions& opts = {});
NodeRelation evaluate(const Tree& t, const PathFormula& p, const EvalOptions& opts = {});

bool model_check(const Tree& t, const NodeFormula& f, const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Syntactic fragments.

enum class FragmentClass { core, conditional, full };

struct Fragment {
  FragmentClass cls = FragmentClass::core;
  bool downward = true;
  std::string name() const;  // "cr", "cp", "full"
};

Fragment classify_fragment(const NodeFormula& f);
Fragment classify_fragment(const PathFormula& p);
Fragment classify_fragment(const Formula& f);

}  // namespace pfmc::pdl
