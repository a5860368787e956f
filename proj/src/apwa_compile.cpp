// Node formulas compile in negation normal form: a subformula under an odd
// number of negations is built as the dual automaton directly, so boxes,
// disjunctions and dual path searches never need a complement step.
#include <algorithm>
#include <map>
#include <optional>

#include "pfmc/apwa.hpp"
#include "pfmc/error.hpp"

namespace pfmc {

namespace {

using pdl::NodeExpr;
using pdl::NodeKind;
using pdl::PathExpr;
using pdl::PathKind;

class Compiler {
 public:
  Compiler(Apwa& a, int n) : a_(a), n_(n) {
    if (n < 1) throw PreconditionError("depth bound must be positive");
    for (std::size_t k = 0; k < a.symbols().size(); ++k) index_[a.symbols()[k]] = static_cast<int>(k);
  }

  int node(const NodeExpr& f, bool pol) {
    auto key = std::make_pair(&f, pol);
    if (auto it = node_cache_.find(key); it != node_cache_.end()) return it->second;
    int q = build_node(f, pol);
    node_cache_[key] = q;
    return q;
  }

  int path(const PathExpr& p, int next, bool pol) {
    auto key = std::make_tuple(&p, next, pol);
    if (auto it = path_cache_.find(key); it != path_cache_.end()) return it->second;
    int q = build_path(p, next, pol);
    path_cache_[key] = q;
    return q;
  }

 private:
  int color(bool pol) const { return pol ? 1 : 2; }
  int join(bool pol, int x, int y) { return pol ? a_.disj(x, y) : a_.conj(x, y); }
  int meet(bool pol, int x, int y) { return pol ? a_.conj(x, y) : a_.disj(x, y); }
  int fail(bool pol) const { return pol ? a_.bot() : a_.top(); }
  int symbols() const { return static_cast<int>(a_.symbols().size()); }
  static int open(int k) { return 2 + 2 * k; }
  static int close(int k) { return 3 + 2 * k; }

  // Labels at which (pol ? f : !f) holds, when f only inspects the label.
  std::optional<std::vector<bool>> label_set(const NodeExpr& f, bool pol) {
    const int m = symbols();
    switch (f.kind) {
      case NodeKind::atom: {
        auto it = index_.find(f.atom);
        if (it == index_.end()) throw PreconditionError("unknown atom '" + f.atom + "'");
        std::vector<bool> s(m, !pol);
        s[it->second] = pol;
        return s;
      }
      case NodeKind::top:
        return std::vector<bool>(m, pol);
      case NodeKind::negation:
        return label_set(*f.lhs, !pol);
      case NodeKind::conjunction: {
        auto l = label_set(*f.lhs, pol);
        if (!l) return std::nullopt;
        auto r = label_set(*f.rhs, pol);
        if (!r) return std::nullopt;
        for (int k = 0; k < m; ++k) (*l)[k] = pol ? (*l)[k] && (*r)[k] : (*l)[k] || (*r)[k];
        return l;
      }
      case NodeKind::diamond:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // Checks that the automaton sits on an opening symbol tag, then runs f.
  int guarded(int target) {
    int g = a_.add_state(1);
    for (int k = 0; k < symbols(); ++k) a_.set_delta(g, open(k), a_.atom(target, 0));
    return g;
  }

  int build_node(const NodeExpr& f, bool pol) {
    if (auto s = label_set(f, pol)) {
      int q = a_.add_state(1);
      for (int k = 0; k < symbols(); ++k)
        if ((*s)[k]) a_.set_delta(q, open(k), a_.top());
      return q;
    }
    switch (f.kind) {
      case NodeKind::negation:
        return node(*f.lhs, !pol);
      case NodeKind::conjunction: {
        int l = node(*f.lhs, pol), r = node(*f.rhs, pol);
        int q = a_.add_state(1);
        a_.set_delta_all(q, meet(pol, a_.atom(l, 0), a_.atom(r, 0)));
        return q;
      }
      case NodeKind::diamond: {
        int target = node(*f.lhs, pol);
        return guarded(path(*f.path, target, pol));
      }
      default:
        break;  // label-only formulas were handled above
    }
    throw Error("unreachable node formula kind");
  }

  // Counter states 0..n_ in the path's color.
  std::vector<int> counters(bool pol) {
    std::vector<int> st(n_ + 1);
    for (int c = 0; c <= n_; ++c) st[c] = a_.add_state(color(pol));
    return st;
  }

  int build_path(const PathExpr& p, int next, bool pol) {
    const int m = symbols();
    const int F = fail(pol);
    switch (p.kind) {
      case PathKind::down: {
        // d[c]: c tags of the start's subtree are open; children sit at c == 1
        auto d = counters(pol);
        int s0 = a_.add_state(color(pol));
        a_.set_delta_all(s0, F);
        for (int c = 0; c <= n_; ++c) a_.set_delta_all(d[c], F);
        for (int k = 0; k < m; ++k) {
          a_.set_delta(s0, open(k), a_.atom(d[1], +1));
          for (int c = 1; c <= n_; ++c) {
            int deeper = c < n_ ? a_.atom(d[c + 1], +1) : F;
            a_.set_delta(d[c], open(k), c == 1 ? join(pol, a_.atom(next, 0), deeper) : deeper);
            a_.set_delta(d[c], close(k), c == 1 ? F : a_.atom(d[c - 1], +1));
          }
        }
        return s0;
      }
      case PathKind::right: {
        // t[c]: inside the start's subtree; f: just after it
        auto t = counters(pol);
        int s0 = a_.add_state(color(pol));
        int after = a_.add_state(color(pol));
        a_.set_delta_all(s0, F);
        a_.set_delta_all(after, F);
        for (int c = 0; c <= n_; ++c) a_.set_delta_all(t[c], F);
        for (int k = 0; k < m; ++k) {
          a_.set_delta(s0, open(k), a_.atom(t[1], +1));
          a_.set_delta(after, open(k), a_.atom(next, 0));
          for (int c = 1; c <= n_; ++c) {
            if (c < n_) a_.set_delta(t[c], open(k), a_.atom(t[c + 1], +1));
            a_.set_delta(t[c], close(k), a_.atom(c == 1 ? after : t[c - 1], +1));
          }
        }
        return s0;
      }
      case PathKind::inverse: {
        const PathExpr& base = *p.lhs;
        if (base.kind == PathKind::down) return up(next, pol);
        if (base.kind == PathKind::right) return left(next, pol);
        throw Error("inverse must be pushed to atomic steps before compiling");
      }
      case PathKind::test: {
        int q = a_.add_state(color(pol));
        a_.set_delta_all(q, meet(pol, a_.atom(next, 0), a_.atom(node(*p.test, pol), 0)));
        return q;
      }
      case PathKind::sequence:
        return path(*p.lhs, path(*p.rhs, next, pol), pol);
      case PathKind::choice: {
        int l = path(*p.lhs, next, pol), r = path(*p.rhs, next, pol);
        int q = a_.add_state(color(pol));
        a_.set_delta_all(q, join(pol, a_.atom(l, 0), a_.atom(r, 0)));
        return q;
      }
      case PathKind::star: {
        int q = a_.add_state(color(pol));
        int body = path(*p.lhs, q, pol);
        a_.set_delta_all(q, join(pol, a_.atom(next, 0), a_.atom(body, 0)));
        return q;
      }
    }
    throw Error("unreachable path formula kind");
  }

  // u[c]: walking left, c subtrees still to leave; the parent is the
  // first opening tag met with c == 0.
  int up(int next, bool pol) {
    const int F = fail(pol);
    auto u = counters(pol);
    int s0 = a_.add_state(color(pol));
    a_.set_delta_all(s0, F);
    for (int c = 0; c <= n_; ++c) a_.set_delta_all(u[c], F);
    for (int k = 0; k < symbols(); ++k) {
      a_.set_delta(s0, open(k), a_.atom(u[0], -1));
      for (int c = 0; c <= n_; ++c) {
        a_.set_delta(u[c], open(k), c == 0 ? a_.atom(next, 0) : a_.atom(u[c - 1], -1));
        if (c < n_) a_.set_delta(u[c], close(k), a_.atom(u[c + 1], -1));
      }
    }
    return s0;
  }

  // b[c]: walking left through the previous sibling's subtree; its opening
  // tag is met with c == 1.
  int left(int next, bool pol) {
    const int F = fail(pol);
    auto b = counters(pol);
    int s0 = a_.add_state(color(pol));
    a_.set_delta_all(s0, F);
    for (int c = 0; c <= n_; ++c) a_.set_delta_all(b[c], F);
    for (int k = 0; k < symbols(); ++k) {
      a_.set_delta(s0, open(k), a_.atom(b[0], -1));
      for (int c = 0; c <= n_; ++c) {
        if (c >= 1) a_.set_delta(b[c], open(k), c == 1 ? a_.atom(next, 0) : a_.atom(b[c - 1], -1));
        if (c < n_) a_.set_delta(b[c], close(k), a_.atom(b[c + 1], -1));
      }
    }
    return s0;
  }

  Apwa& a_;
  int n_;
  std::map<std::string, int> index_;
  std::map<std::pair<const NodeExpr*, bool>, int> node_cache_;
  std::map<std::tuple<const PathExpr*, int, bool>, int> path_cache_;
};

}  // namespace

Apwa compile_formula(const pdl::NodeFormula& f, const std::vector<std::string>& symbols, int n) {
  Apwa a(symbols);
  pdl::NodeFormula g = pdl::push_inverse(f);
  Compiler c(a, n);
  a.set_initial(c.node(*g, true));
  return a;
}

Apwa compile_path(const pdl::PathFormula& p, const std::vector<std::string>& symbols, int n) {
  Apwa a(symbols);
  pdl::PathFormula g = pdl::push_inverse(p);
  int cont = a.add_state(1);
  a.set_delta_all(cont, a.top());
  a.mark_continuation(cont);
  Compiler c(a, n);
  a.set_initial(c.path(*g, cont, true));
  return a;
}

}  // namespace pfmc
