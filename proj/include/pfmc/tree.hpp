#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pfmc {

/// Finite ordered labeled tree.
struct Tree {
  std::string label;
  std::vector<Tree> children;

  Tree() = default;
  explicit Tree(std::string l, std::vector<Tree> c = {})
      : label(std::move(l)), children(std::move(c)) {}

  bool is_leaf() const noexcept { return children.empty(); }
  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Tree&, const Tree&) = default;
  friend auto operator<=>(const Tree& a, const Tree& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.children <=> b.children;
  }
};

/// S-expression form: `(S (VN (v demande)))`; leaves printed bare.
std::string to_sexpr(const Tree& t);
Tree parse_sexpr(std::string_view text);

/// Leaf labels left to right; `eps` leaves contribute nothing.
std::vector<std::string> tree_yield(const Tree& t);

/// Maps a label to the set of propositions holding at nodes carrying it.
/// Labels without an entry carry exactly {label}.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::map<std::string, std::set<std::string>> table)
      : table_(std::move(table)) {}

  bool holds(const std::string& label, const std::string& prop) const;
  std::set<std::string> props(const std::string& label) const;
  void set(const std::string& label, std::set<std::string> props) {
    table_[label] = std::move(props);
  }
  const std::map<std::string, std::set<std::string>>& table() const {
    return table_;
  }

 private:
  std::map<std::string, std::set<std::string>> table_;
};

inline constexpr const char* kEpsilon = "eps";

}  // namespace pfmc
