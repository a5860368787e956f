#include <cctype>
#include <functional>

#include "pfmc/error.hpp"
#include "pfmc/pdl.hpp"

namespace pfmc::pdl {

namespace {

NodeFormula make_node(NodeKind k, std::string a, NodeFormula l, NodeFormula r, PathFormula p) {
  return std::make_shared<const NodeExpr>(
      NodeExpr{k, std::move(a), std::move(l), std::move(r), std::move(p)});
}

PathFormula make_path(PathKind k, PathFormula l, PathFormula r, NodeFormula t) {
  return std::make_shared<const PathExpr>(
      PathExpr{k, std::move(l), std::move(r), std::move(t)});
}

}  // namespace

NodeFormula atom(std::string name) {
  if (name.empty()) throw Error("empty atom name");
  return make_node(NodeKind::atom, std::move(name), nullptr, nullptr, nullptr);
}
NodeFormula top() {
  static const NodeFormula t = make_node(NodeKind::top, "", nullptr, nullptr, nullptr);
  return t;
}
NodeFormula neg(NodeFormula f) {
  return make_node(NodeKind::negation, "", std::move(f), nullptr, nullptr);
}
NodeFormula conj(NodeFormula a, NodeFormula b) {
  return make_node(NodeKind::conjunction, "", std::move(a), std::move(b), nullptr);
}
NodeFormula diamond(PathFormula p, NodeFormula f) {
  return make_node(NodeKind::diamond, "", std::move(f), nullptr, std::move(p));
}

PathFormula down() {
  static const PathFormula d = make_path(PathKind::down, nullptr, nullptr, nullptr);
  return d;
}
PathFormula right() {
  static const PathFormula r = make_path(PathKind::right, nullptr, nullptr, nullptr);
  return r;
}
PathFormula seq(PathFormula a, PathFormula b) {
  return make_path(PathKind::sequence, std::move(a), std::move(b), nullptr);
}
PathFormula choice(PathFormula a, PathFormula b) {
  return make_path(PathKind::choice, std::move(a), std::move(b), nullptr);
}
PathFormula star(PathFormula p) { return make_path(PathKind::star, std::move(p), nullptr, nullptr); }
PathFormula inverse(PathFormula p) {
  return make_path(PathKind::inverse, std::move(p), nullptr, nullptr);
}
PathFormula test(NodeFormula f) { return make_path(PathKind::test, nullptr, nullptr, std::move(f)); }

NodeFormula bot() { return neg(top()); }
NodeFormula disj(NodeFormula a, NodeFormula b) {
  return neg(conj(neg(std::move(a)), neg(std::move(b))));
}
NodeFormula implies(NodeFormula a, NodeFormula b) { return disj(neg(std::move(a)), std::move(b)); }
NodeFormula iff(NodeFormula a, NodeFormula b) {
  return conj(implies(a, b), implies(b, a));
}
NodeFormula box(PathFormula p, NodeFormula f) { return neg(diamond(std::move(p), neg(std::move(f)))); }

NodeFormula conj_all(const std::vector<NodeFormula>& fs) {
  if (fs.empty()) return top();
  NodeFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

NodeFormula disj_all(const std::vector<NodeFormula>& fs) {
  if (fs.empty()) return bot();
  NodeFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

PathFormula up() { return inverse(down()); }
PathFormula left() { return inverse(right()); }
PathFormula plus(PathFormula p) { return seq(p, star(p)); }

PathFormula power(PathFormula p, int k) {
  if (k < 1) throw Error("path power needs a positive exponent");
  PathFormula acc = p;
  for (int i = 1; i < k; ++i) acc = seq(acc, p);
  return acc;
}

PathFormula seq_all(const std::vector<PathFormula>& ps) {
  if (ps.empty()) return test(top());
  PathFormula acc = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) acc = seq(acc, ps[i]);
  return acc;
}

PathFormula choice_all(const std::vector<PathFormula>& ps) {
  if (ps.empty()) return test(bot());
  PathFormula acc = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) acc = choice(acc, ps[i]);
  return acc;
}

NodeFormula root_macro() { return neg(diamond(up(), top())); }
NodeFormula leaf_macro() { return neg(diamond(down(), top())); }
NodeFormula first_macro() { return neg(diamond(left(), top())); }
NodeFormula last_macro() { return neg(diamond(right(), top())); }
PathFormula firstchild_macro() { return seq(down(), test(first_macro())); }
PathFormula dfnext_macro() {
  return seq(seq(star(seq(test(last_macro()), up())), right()),
             star(seq(down(), test(first_macro()))));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_ident_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '\'' || c == '.' || c == '~' || c == '$' ||
         c == '@' || c == ':' || u >= 0x80;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {"true", "false", "down", "up", "left", "right",
                                              "let", "root", "leaf", "first", "last",
                                              "firstchild", "dfnext"};
  return words;
}

std::string print_atom(const std::string& a) {
  bool plain = !a.empty() && !reserved_words().count(a);
  for (char c : a) plain = plain && is_ident_char(c);
  if (plain) return a;
  std::string out = "\"";
  for (char c : a) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void print_node(const NodeFormula& f, std::string& out);

void print_path(const PathFormula& p, std::string& out) {
  switch (p->kind) {
    case PathKind::down:
      out += "down";
      return;
    case PathKind::right:
      out += "right";
      return;
    case PathKind::sequence:
      out += '(';
      print_path(p->lhs, out);
      out += " ; ";
      print_path(p->rhs, out);
      out += ')';
      return;
    case PathKind::choice:
      out += '(';
      print_path(p->lhs, out);
      out += " + ";
      print_path(p->rhs, out);
      out += ')';
      return;
    case PathKind::star:
      print_path(p->lhs, out);
      out += '*';
      return;
    case PathKind::inverse:
      print_path(p->lhs, out);
      out += "^-1";
      return;
    case PathKind::test:
      if (p->test->kind == NodeKind::atom || p->test->kind == NodeKind::top) {
        print_node(p->test, out);
      } else {
        out += '(';
        print_node(p->test, out);
        out += ')';
      }
      out += '?';
      return;
  }
}

void print_node(const NodeFormula& f, std::string& out) {
  switch (f->kind) {
    case NodeKind::atom:
      out += print_atom(f->atom);
      return;
    case NodeKind::top:
      out += "true";
      return;
    case NodeKind::negation:
      out += '!';
      print_node(f->lhs, out);
      return;
    case NodeKind::conjunction:
      out += '(';
      print_node(f->lhs, out);
      out += " & ";
      print_node(f->rhs, out);
      out += ')';
      return;
    case NodeKind::diamond:
      out += '<';
      print_path(f->path, out);
      out += '>';
      print_node(f->lhs, out);
      return;
  }
}

}  // namespace

std::string print(const NodeFormula& f) {
  std::string out;
  print_node(f, out);
  return out;
}

std::string print(const PathFormula& p) {
  std::string out;
  print_path(p, out);
  return out;
}

// ---------------------------------------------------------------------------
// Structural helpers

std::size_t size(const PathFormula& p);

std::size_t size(const NodeFormula& f) {
  switch (f->kind) {
    case NodeKind::atom:
    case NodeKind::top:
      return 1;
    case NodeKind::negation:
      return 1 + size(f->lhs);
    case NodeKind::conjunction:
      return 1 + size(f->lhs) + size(f->rhs);
    case NodeKind::diamond:
      return 1 + size(f->path) + size(f->lhs);
  }
  return 0;
}

std::size_t size(const PathFormula& p) {
  switch (p->kind) {
    case PathKind::down:
    case PathKind::right:
      return 1;
    case PathKind::sequence:
    case PathKind::choice:
      return 1 + size(p->lhs) + size(p->rhs);
    case PathKind::star:
    case PathKind::inverse:
      return 1 + size(p->lhs);
    case PathKind::test:
      return 1 + size(p->test);
  }
  return 0;
}

namespace {

void collect_atoms(const NodeFormula& f, std::set<std::string>& out);

void collect_atoms(const PathFormula& p, std::set<std::string>& out) {
  if (p->lhs) collect_atoms(p->lhs, out);
  if (p->rhs) collect_atoms(p->rhs, out);
  if (p->test) collect_atoms(p->test, out);
}

void collect_atoms(const NodeFormula& f, std::set<std::string>& out) {
  if (f->kind == NodeKind::atom) out.insert(f->atom);
  if (f->lhs) collect_atoms(f->lhs, out);
  if (f->rhs) collect_atoms(f->rhs, out);
  if (f->path) collect_atoms(f->path, out);
}

}  // namespace

std::set<std::string> atoms(const NodeFormula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

std::set<std::string> atoms(const PathFormula& p) {
  std::set<std::string> out;
  collect_atoms(p, out);
  return out;
}

bool equal(const PathFormula& a, const PathFormula& b);

bool equal(const NodeFormula& a, const NodeFormula& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::atom:
      return a->atom == b->atom;
    case NodeKind::top:
      return true;
    case NodeKind::negation:
      return equal(a->lhs, b->lhs);
    case NodeKind::conjunction:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case NodeKind::diamond:
      return equal(a->path, b->path) && equal(a->lhs, b->lhs);
  }
  return false;
}

bool equal(const PathFormula& a, const PathFormula& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case PathKind::down:
    case PathKind::right:
      return true;
    case PathKind::sequence:
    case PathKind::choice:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case PathKind::star:
    case PathKind::inverse:
      return equal(a->lhs, b->lhs);
    case PathKind::test:
      return equal(a->test, b->test);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

struct Substituter {
  const Substitution& s;
  std::map<const NodeExpr*, NodeFormula> node_memo;
  std::map<const PathExpr*, PathFormula> path_memo;

  NodeFormula node(const NodeFormula& f) {
    if (auto it = node_memo.find(f.get()); it != node_memo.end()) return it->second;
    NodeFormula out;
    switch (f->kind) {
      case NodeKind::atom: {
        auto it = s.atoms.find(f->atom);
        if (it != s.atoms.end()) {
          out = it->second;
        } else if (s.require_total) {
          throw PreconditionError("no interpretation for atom '" + f->atom + "'");
        } else {
          out = f;
        }
        break;
      }
      case NodeKind::top:
        out = f;
        break;
      case NodeKind::negation:
        out = neg(node(f->lhs));
        break;
      case NodeKind::conjunction:
        out = conj(node(f->lhs), node(f->rhs));
        break;
      case NodeKind::diamond:
        out = diamond(path(f->path), node(f->lhs));
        break;
    }
    node_memo.emplace(f.get(), out);
    return out;
  }

  PathFormula path(const PathFormula& p) {
    if (auto it = path_memo.find(p.get()); it != path_memo.end()) return it->second;
    PathFormula out;
    switch (p->kind) {
      case PathKind::down:
        out = s.down ? s.down : p;
        break;
      case PathKind::right:
        out = s.right ? s.right : p;
        break;
      case PathKind::sequence:
        out = seq(path(p->lhs), path(p->rhs));
        break;
      case PathKind::choice:
        out = choice(path(p->lhs), path(p->rhs));
        break;
      case PathKind::star:
        out = star(path(p->lhs));
        break;
      case PathKind::inverse:
        out = inverse(path(p->lhs));
        break;
      case PathKind::test:
        out = test(node(p->test));
        break;
    }
    path_memo.emplace(p.get(), out);
    return out;
  }
};

PathFormula push_inv(const PathFormula& p, bool inverted);

NodeFormula push_inv_node(const NodeFormula& f) {
  switch (f->kind) {
    case NodeKind::atom:
    case NodeKind::top:
      return f;
    case NodeKind::negation:
      return neg(push_inv_node(f->lhs));
    case NodeKind::conjunction:
      return conj(push_inv_node(f->lhs), push_inv_node(f->rhs));
    case NodeKind::diamond:
      return diamond(push_inv(f->path, false), push_inv_node(f->lhs));
  }
  return f;
}

PathFormula push_inv(const PathFormula& p, bool inverted) {
  switch (p->kind) {
    case PathKind::down:
    case PathKind::right:
      return inverted ? inverse(p) : p;
    case PathKind::sequence:
      return inverted ? seq(push_inv(p->rhs, true), push_inv(p->lhs, true))
                      : seq(push_inv(p->lhs, false), push_inv(p->rhs, false));
    case PathKind::choice:
      return choice(push_inv(p->lhs, inverted), push_inv(p->rhs, inverted));
    case PathKind::star:
      return star(push_inv(p->lhs, inverted));
    case PathKind::inverse:
      return push_inv(p->lhs, !inverted);
    case PathKind::test:
      return test(push_inv_node(p->test));
  }
  return p;
}

}  // namespace

NodeFormula substitute(const NodeFormula& f, const Substitution& s) {
  Substituter sub{s, {}, {}};
  return sub.node(f);
}

PathFormula substitute(const PathFormula& p, const Substitution& s) {
  Substituter sub{s, {}, {}};
  return sub.path(p);
}

PathFormula push_inverse(const PathFormula& p) { return push_inv(p, false); }
NodeFormula push_inverse(const NodeFormula& f) { return push_inv_node(f); }

// ---------------------------------------------------------------------------
// Fragments

std::string Fragment::name() const {
  switch (cls) {
    case FragmentClass::core:
      return "cr";
    case FragmentClass::conditional:
      return "cp";
    case FragmentClass::full:
      return "full";
  }
  return "full";
}

namespace {

bool is_atomic_step(const PathFormula& p) {
  if (p->kind == PathKind::down || p->kind == PathKind::right) return true;
  return p->kind == PathKind::inverse &&
         (p->lhs->kind == PathKind::down || p->lhs->kind == PathKind::right);
}

struct Classifier {
  Fragment result;

  void raise(FragmentClass c) {
    if (static_cast<int>(c) > static_cast<int>(result.cls)) result.cls = c;
  }

  void node(const NodeFormula& f) {
    if (f->lhs) node(f->lhs);
    if (f->rhs) node(f->rhs);
    if (f->path) path(f->path);
  }

  void path(const PathFormula& p) {
    switch (p->kind) {
      case PathKind::down:
        return;
      case PathKind::right:
        result.downward = false;
        return;
      case PathKind::sequence:
      case PathKind::choice:
        path(p->lhs);
        path(p->rhs);
        return;
      case PathKind::test:
        node(p->test);
        return;
      case PathKind::inverse:
        // upward or leftward navigation in any case
        result.downward = false;
        if (!is_atomic_step(p)) raise(FragmentClass::full);
        path(p->lhs);
        return;
      case PathKind::star: {
        const PathFormula& body = p->lhs;
        if (is_atomic_step(body)) {
          path(body);
        } else if (body->kind == PathKind::sequence && is_atomic_step(body->lhs) &&
                   body->rhs->kind == PathKind::test) {
          raise(FragmentClass::conditional);
          path(body);
        } else {
          raise(FragmentClass::full);
          path(body);
        }
        return;
      }
    }
  }
};

}  // namespace

Fragment classify_fragment(const NodeFormula& f) {
  Classifier c;
  c.node(f);
  return c.result;
}

Fragment classify_fragment(const PathFormula& p) {
  Classifier c;
  c.path(p);
  return c.result;
}

Fragment classify_fragment(const Formula& f) {
  return std::visit([](const auto& x) { return classify_fragment(x); }, f);
}

}  // namespace pfmc::pdl
