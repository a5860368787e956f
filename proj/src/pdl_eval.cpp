#include <unordered_map>

#include "pfmc/error.hpp"
#include "pfmc/pdl.hpp"

namespace pfmc::pdl {

IndexedTree::IndexedTree(const Tree& t) { build(t, -1); }

void IndexedTree::build(const Tree& t, int parent) {
  int me = static_cast<int>(labels_.size());
  labels_.push_back(t.label);
  parent_.push_back(parent);
  next_.push_back(-1);
  prev_.push_back(-1);
  children_.emplace_back();
  int last = -1;
  for (const Tree& c : t.children) {
    int id = static_cast<int>(labels_.size());
    children_[me].push_back(id);
    build(c, me);
    if (last >= 0) {
      next_[last] = id;
      prev_[id] = last;
    }
    last = id;
  }
}

std::vector<int> IndexedTree::address(std::size_t u) const {
  std::vector<int> out;
  for (int v = static_cast<int>(u); parent_[v] >= 0; v = parent_[v]) {
    const auto& sib = children_[parent_[v]];
    out.push_back(static_cast<int>(std::find(sib.begin(), sib.end(), v) - sib.begin()));
  }
  return {out.rbegin(), out.rend()};
}

NodeRelation NodeRelation::transpose() const {
  NodeRelation r(size());
  for (std::size_t u = 0; u < size(); ++u)
    for (auto v = rows[u].find_first(); v != NodeSet::npos; v = rows[u].find_next(v))
      r.rows[v].set(u);
  return r;
}

namespace {

// Node sets are computed through pre-images and images of paths, so no
// relation is materialized unless a path is evaluated on its own.
class Evaluator {
 public:
  Evaluator(const IndexedTree& t, const EvalOptions& o) : t_(t), opts_(o), n_(t.size()) {}

  NodeSet node(const NodeFormula& f) {
    if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
    NodeSet out(n_);
    switch (f->kind) {
      case NodeKind::atom:
        out = atom_set(f->atom);
        break;
      case NodeKind::top:
        out.set();
        break;
      case NodeKind::negation:
        out = ~node(f->lhs);
        break;
      case NodeKind::conjunction:
        out = node(f->lhs) & node(f->rhs);
        break;
      case NodeKind::diamond:
        out = pre(f->path, node(f->lhs));
        break;
    }
    memo_.emplace(f.get(), out);
    return out;
  }

  // {u | exists v in s with (u,v) in p}
  NodeSet pre(const PathFormula& p, const NodeSet& s) {
    switch (p->kind) {
      case PathKind::down: {
        NodeSet out(n_);
        for (auto v = s.find_first(); v != NodeSet::npos; v = s.find_next(v))
          if (t_.parent(v) >= 0) out.set(t_.parent(v));
        return out;
      }
      case PathKind::right: {
        NodeSet out(n_);
        for (auto v = s.find_first(); v != NodeSet::npos; v = s.find_next(v))
          if (t_.prev_sibling(v) >= 0) out.set(t_.prev_sibling(v));
        return out;
      }
      case PathKind::sequence:
        return pre(p->lhs, pre(p->rhs, s));
      case PathKind::choice:
        return pre(p->lhs, s) | pre(p->rhs, s);
      case PathKind::star: {
        NodeSet acc = s;
        NodeSet frontier = s;
        while (frontier.any()) {
          NodeSet next = pre(p->lhs, frontier);
          frontier = next - acc;
          acc |= next;
        }
        return acc;
      }
      case PathKind::inverse:
        return post(p->lhs, s);
      case PathKind::test:
        return s & node(p->test);
    }
    return NodeSet(n_);
  }

  // {v | exists u in s with (u,v) in p}
  NodeSet post(const PathFormula& p, const NodeSet& s) {
    switch (p->kind) {
      case PathKind::down: {
        NodeSet out(n_);
        for (auto u = s.find_first(); u != NodeSet::npos; u = s.find_next(u))
          for (int c : t_.children(u)) out.set(c);
        return out;
      }
      case PathKind::right: {
        NodeSet out(n_);
        for (auto u = s.find_first(); u != NodeSet::npos; u = s.find_next(u))
          if (t_.next_sibling(u) >= 0) out.set(t_.next_sibling(u));
        return out;
      }
      case PathKind::sequence:
        return post(p->rhs, post(p->lhs, s));
      case PathKind::choice:
        return post(p->lhs, s) | post(p->rhs, s);
      case PathKind::star: {
        NodeSet acc = s;
        NodeSet frontier = s;
        while (frontier.any()) {
          NodeSet next = post(p->lhs, frontier);
          frontier = next - acc;
          acc |= next;
        }
        return acc;
      }
      case PathKind::inverse:
        return pre(p->lhs, s);
      case PathKind::test:
        return s & node(p->test);
    }
    return NodeSet(n_);
  }

  NodeRelation relation(const PathFormula& p) {
    NodeRelation r(n_);
    NodeSet single(n_);
    for (std::size_t u = 0; u < n_; ++u) {
      single.set(u);
      r.rows[u] = post(p, single);
      single.reset(u);
    }
    return r;
  }

 private:
  NodeSet atom_set(const std::string& a) {
    NodeSet out(n_);
    if (opts_.known_props && !opts_.known_props->count(a)) {
      if (opts_.lenient) return out;
      throw Error("unknown proposition '" + a + "'");
    }
    for (std::size_t u = 0; u < n_; ++u) {
      const std::string& l = t_.label(u);
      if (opts_.labeling ? opts_.labeling->holds(l, a) : l == a) out.set(u);
    }
    return out;
  }

  const IndexedTree& t_;
  const EvalOptions& opts_;
  std::size_t n_;
  std::unordered_map<const NodeExpr*, NodeSet> memo_;
};

}  // namespace

NodeSet evaluate(const IndexedTree& t, const NodeFormula& f, const EvalOptions& opts) {
  return Evaluator(t, opts).node(f);
}

NodeRelation evaluate(const IndexedTree& t, const PathFormula& p, const EvalOptions& opts) {
  return Evaluator(t, opts).relation(p);
}

NodeSet evaluate(const Tree& t, const NodeFormula& f, const EvalOptions& opts) {
  return evaluate(IndexedTree(t), f, opts);
}

NodeRelation evaluate(const Tree& t, const PathFormula& p, const EvalOptions& opts) {
  return evaluate(IndexedTree(t), p, opts);
}

bool model_check(const Tree& t, const NodeFormula& f, const EvalOptions& opts) {
  return evaluate(t, f, opts).test(0);
}

}  // namespace pfmc::pdl
