#pragma once

// Reduced ordered decision diagrams with hash-consed nodes. Node ids are
// canonical: two ids are equal iff they denote the same boolean function.

#include <climits>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace pfmc::detail {

class Bdd {
 public:
  static constexpr int kFalse = 0;
  static constexpr int kTrue = 1;

  Bdd();

  int var(int v);
  int ite(int f, int g, int h);
  int land(int a, int b) { return ite(a, b, kFalse); }
  int lor(int a, int b) { return ite(a, kTrue, b); }

  /// Simultaneous substitution; `sub(v)` returns the replacement of
  /// variable v. `sub` must not itself call compose.
  template <class Sub>
  int compose(int f, Sub&& sub) {
    if (f <= kTrue) return f;
    ++memo_epoch_;
    if (memo_stamp_.size() < nodes_.size()) {
      memo_stamp_.resize(nodes_.size() * 2, 0);
      memo_val_.resize(nodes_.size() * 2, 0);
    }
    return compose_rec(f, sub);
  }
  std::vector<int> support(int f) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t cache_size() const { return ite_cache_.size(); }
  /// Drops operation caches; node ids stay valid.
  void clear_caches() { ite_cache_.clear(); }

 private:
  struct Node {
    int var, lo, hi;
  };
  struct Key {
    int a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = static_cast<std::uint32_t>(k.a);
      h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.b);
      h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.c);
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  int mk(int v, int lo, int hi);
  int top_var(int f) const { return nodes_[f].var; }
  int cofactor(int f, int v, bool high) const {
    if (nodes_[f].var != v) return f;
    return high ? nodes_[f].hi : nodes_[f].lo;
  }

  template <class Sub>
  int compose_rec(int u, Sub& sub) {
    if (u <= kTrue) return u;
    if (memo_stamp_[u] == memo_epoch_) return memo_val_[u];
    Node n = nodes_[u];
    int lo = compose_rec(n.lo, sub), hi = compose_rec(n.hi, sub);
    int r = ite(sub(n.var), hi, lo);
    memo_stamp_[u] = memo_epoch_;
    memo_val_[u] = r;
    return r;
  }

  std::vector<Node> nodes_;
  std::vector<unsigned> memo_stamp_;
  std::vector<int> memo_val_;
  unsigned memo_epoch_ = 0;
  std::unordered_map<Key, int, KeyHash> unique_;
  std::unordered_map<Key, int, KeyHash> ite_cache_;
};

}  // namespace pfmc::detail
