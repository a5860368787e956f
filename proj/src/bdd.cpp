#include "bdd.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace pfmc::detail {

Bdd::Bdd() {
  nodes_.push_back({INT_MAX, 0, 0});
  nodes_.push_back({INT_MAX, 1, 1});
}

int Bdd::mk(int v, int lo, int hi) {
  if (lo == hi) return lo;
  auto [it, fresh] = unique_.emplace(Key{v, lo, hi}, static_cast<int>(nodes_.size()));
  if (fresh) nodes_.push_back({v, lo, hi});
  return it->second;
}

int Bdd::var(int v) { return mk(v, kFalse, kTrue); }

int Bdd::ite(int f, int g, int h) {
  if (f == kTrue) return g;
  if (f == kFalse) return h;
  if (g == h) return g;
  if (g == kTrue && h == kFalse) return f;
  Key key{f, g, h};
  if (auto it = ite_cache_.find(key); it != ite_cache_.end()) return it->second;
  int v = std::min({top_var(f), top_var(g), top_var(h)});
  int hi = ite(cofactor(f, v, true), cofactor(g, v, true), cofactor(h, v, true));
  int lo = ite(cofactor(f, v, false), cofactor(g, v, false), cofactor(h, v, false));
  int r = mk(v, lo, hi);
  ite_cache_.emplace(key, r);
  return r;
}

std::vector<int> Bdd::support(int f) const {
  std::set<int> vars;
  std::vector<int> todo{f};
  std::unordered_set<int> seen;
  while (!todo.empty()) {
    int u = todo.back();
    todo.pop_back();
    if (u <= kTrue || !seen.insert(u).second) continue;
    vars.insert(nodes_[u].var);
    todo.push_back(nodes_[u].lo);
    todo.push_back(nodes_[u].hi);
  }
  return {vars.begin(), vars.end()};
}

}  // namespace pfmc::detail
