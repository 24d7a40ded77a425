#pragma once

#include <bit>
#include <optional>

#include "jbt/common.hpp"

namespace jbt::tries {

// Flattened (id, count) projection of a fingerprint; compared for equality.
using FpKey = std::vector<std::uint64_t>;

// Compacted trie with implicit edge labels.  A node's label units are read
// through the Labels policy from the payload of any key passing through it:
//   Id Labels::unit(const Payload&, std::uint64_t k)  -- k-th unit of that key
template <class Payload>
class CompactTrie {
 public:
  struct Node {
    NodeRef parent = kNoNode;
    std::uint64_t depth = 0;
    std::map<Id, NodeRef> children;
    Payload rep{};
    bool terminal = false;
    Payload value{};
    std::uint32_t lo = 0, hi = 0;  // preorder interval of the subtree
  };

  CompactTrie() { nodes_.emplace_back(); }

  const Node& operator[](NodeRef v) const { return nodes_[v]; }
  Node& at(NodeRef v) { return nodes_[v]; }
  std::size_t size() const { return nodes_.size(); }
  static constexpr NodeRef root() { return 0; }

  NodeRef child(NodeRef v, Id unit) const {
    auto it = nodes_[v].children.find(unit);
    return it == nodes_[v].children.end() ? kNoNode : it->second;
  }

  // Unit-by-unit insertion; returns the key's node.  An existing terminal
  // keeps its first value.
  template <class Labels, class Key>
  NodeRef insert(const Labels& L, const Key& key, const Payload& p, bool* created = nullptr) {
    const std::uint64_t n = key.length();
    NodeRef v = root();
    std::uint64_t d = 0;
    while (d < n) {
      Id u = key.unit(d);
      NodeRef c = child(v, u);
      if (c == kNoNode) {
        v = add_leaf(v, u, n, p);
        d = n;
        break;
      }
      std::uint64_t e = std::min(nodes_[c].depth, n), k = d + 1;
      while (k < e && L.unit(nodes_[c].rep, k) == key.unit(k)) ++k;
      if (k < nodes_[c].depth) c = split(c, k, L.unit(nodes_[c].rep, k));
      v = c;
      d = k;
    }
    if (created) *created = !nodes_[v].terminal;
    if (!nodes_[v].terminal) {
      nodes_[v].terminal = true;
      nodes_[v].value = p;
    }
    return v;
  }

  // Label-skipping descent, then one verification against the reached
  // node's representative.  Returns the lower node of the key's locus.
  template <class Labels, class Key>
  std::optional<NodeRef> descend(const Labels& L, const Key& key) const {
    const std::uint64_t n = key.length();
    NodeRef v = root();
    while (nodes_[v].depth < n) {
      NodeRef c = child(v, key.unit(nodes_[v].depth));
      if (c == kNoNode) return std::nullopt;
      v = c;
    }
    if (v != root())
      for (std::uint64_t k = 0; k < n; ++k)
        if (L.unit(nodes_[v].rep, k) != key.unit(k)) return std::nullopt;
    return v;
  }

  // Node whose string is exactly the key and which ends an inserted key.
  template <class Labels, class Key>
  std::optional<NodeRef> find(const Labels& L, const Key& key) const {
    auto v = descend(L, key);
    if (!v || nodes_[*v].depth != key.length() || !nodes_[*v].terminal) return std::nullopt;
    return v;
  }

  // New leaf under v at depth `depth` whose edge starts with `unit`.
  NodeRef add_leaf(NodeRef v, Id unit, std::uint64_t depth, const Payload& p) {
    Node leaf;
    leaf.parent = v;
    leaf.depth = depth;
    leaf.rep = p;
    NodeRef id = NodeRef(nodes_.size());
    nodes_.push_back(std::move(leaf));
    nodes_[v].children[unit] = id;
    return id;
  }

  // Splits the edge above c at depth k; `next` is c's label unit at depth k.
  NodeRef split(NodeRef c, std::uint64_t k, Id next) {
    NodeRef par = nodes_[c].parent;
    Node s;
    s.parent = par;
    s.depth = k;
    s.rep = nodes_[c].rep;
    NodeRef id = NodeRef(nodes_.size());
    for (auto& [u, x] : nodes_[par].children)
      if (x == c) x = id;
    s.children[next] = c;
    nodes_.push_back(std::move(s));
    nodes_[c].parent = id;
    return id;
  }

  // Assigns preorder intervals (children in unit order).
  void finalize() {
    std::uint32_t counter = 0;
    std::vector<std::pair<NodeRef, bool>> stack{{root(), false}};
    while (!stack.empty()) {
      auto [v, done] = stack.back();
      stack.pop_back();
      if (done) {
        nodes_[v].hi = counter - 1;
        continue;
      }
      nodes_[v].lo = counter++;
      stack.push_back({v, true});
      for (auto it = nodes_[v].children.rbegin(); it != nodes_[v].children.rend(); ++it) stack.push_back({it->second, false});
    }
    finalized_ = true;
  }
  bool finalized() const { return finalized_; }
  std::pair<std::uint32_t, std::uint32_t> interval(NodeRef v) const {
    if (!finalized_) throw std::logic_error("trie intervals are not finalized");
    return {nodes_[v].lo, nodes_[v].hi};
  }

  std::vector<Node>& nodes() { return nodes_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  bool finalized_ = false;
};

// Key over an explicit unit vector.
struct VecKey {
  const std::vector<std::uint64_t>* v;
  std::uint64_t length() const { return v->size(); }
  Id unit(std::uint64_t k) const { return (*v)[k]; }
};

// 2-fattest number in (a, b]: the one with the most trailing zeros.
inline std::uint64_t two_fattest(std::uint64_t a, std::uint64_t b) {
  if (a >= b) throw std::invalid_argument("two_fattest: empty interval");
  // Highest bit where a and b differ, cleared below.
  int h = 63 - std::countl_zero(a ^ b);
  return (b >> h) << h;
}

// Compacted trie over letters with z-fast search.  Handles of nodes (their
// 2-fattest-length prefixes) are stored as fingerprint keys in a second
// compacted trie with explicit labels (the handle map).
//   Labels: Id unit(const Payload&, k); FpKey fp(const Payload&, len)
//   Query:  length(); Id unit(k); FpKey fp(len)
template <class Payload>
class ZFastTrie {
 public:
  struct Locus {
    NodeRef node = kNoNode;   // lower node of the locus
    std::uint64_t depth = 0;  // consumed length
  };

  const CompactTrie<Payload>& trie() const { return t_; }
  CompactTrie<Payload>& trie() { return t_; }
  std::size_t handle_count() const { return handleKeys_.size(); }

  // Deepest node whose string is a prefix of q with depth <= b.
  template <class Labels, class Query>
  NodeRef exit_search(const Labels& L, const Query& q, std::uint64_t b) const {
    NodeRef cur = t_.root();
    std::uint64_t a = 0;
    while (a < b) {
      std::uint64_t f = two_fattest(a, b);
      FpKey hk = q.fp(f);
      NodeRef w = lookup_handle(hk);
      if (w != kNoNode && t_[w].depth <= b && t_[w].depth > a &&
          (t_[w].depth == f || q.fp(t_[w].depth) == L.fp(t_[w].rep, t_[w].depth))) {
        a = t_[w].depth;
        cur = w;
      } else {
        b = f - 1;
      }
    }
    return cur;
  }

  // Locus of the whole query, verified by fingerprint.
  template <class Labels, class Query>
  std::optional<Locus> locate(const Labels& L, const Query& q) const {
    const std::uint64_t n = q.length();
    if (n == 0) return Locus{t_.root(), 0};
    NodeRef cur = exit_search(L, q, n - 1);
    NodeRef e = t_.child(cur, q.unit(t_[cur].depth));
    if (e == kNoNode || t_[e].depth < n) return std::nullopt;
    if (q.fp(n) != L.fp(t_[e].rep, n)) return std::nullopt;
    return Locus{e, n};
  }

  template <class Labels, class Query>
  NodeRef insert(const Labels& L, const Query& q, const Payload& p, bool* created = nullptr) {
    const std::uint64_t n = q.length();
    if (n == 0) throw std::invalid_argument("ZFastTrie: empty key");
    NodeRef cur = exit_search(L, q, n - 1);
    std::uint64_t c = t_[cur].depth;
    Id u = q.unit(c);
    NodeRef e = t_.child(cur, u);
    NodeRef v;
    if (e == kNoNode) {
      v = t_.add_leaf(cur, u, n, p);
      set_handle(L, v);
    } else {
      // Longest common prefix with str(e) by binary search on fingerprints.
      std::uint64_t lo = c + 1, hi = std::min(t_[e].depth, n);
      while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (q.fp(mid) == L.fp(t_[e].rep, mid)) lo = mid;
        else hi = mid - 1;
      }
      std::uint64_t l = lo;
      if (l == t_[e].depth) {
        if (l != n) throw std::logic_error("ZFastTrie: exit search missed a prefix node");
        v = e;
      } else {
        NodeRef s = t_.split(e, l, L.unit(t_[e].rep, l));
        split_handles(L, s, e);
        if (l == n) {
          v = s;
        } else {
          v = t_.add_leaf(s, q.unit(l), n, p);
          set_handle(L, v);
        }
      }
    }
    auto& node = t_.at(v);
    if (created) *created = !node.terminal;
    if (!node.terminal) {
      node.terminal = true;
      node.value = p;
    }
    return v;
  }

  NodeRef lookup_handle(const FpKey& key) const {
    VecKey k{&key};
    auto v = hf_.find(HandleLabels{&handleKeys_}, k);
    return v ? hf_[*v].value.second : kNoNode;
  }

  // Handle map entries in insertion order.
  std::vector<std::pair<FpKey, NodeRef>> handles() const {
    std::vector<std::pair<FpKey, NodeRef>> out(handleKeys_.size());
    for (const auto& x : hf_.nodes())
      if (x.terminal) out[x.value.first] = {handleKeys_[x.value.first], x.value.second};
    return out;
  }

  // Replaces the trie and its handle map with stored contents.
  void restore(CompactTrie<Payload> t, const std::vector<std::pair<FpKey, NodeRef>>& hs) {
    t_ = std::move(t);
    handleKeys_.clear();
    hf_ = {};
    HandleLabels hl{&handleKeys_};
    for (const auto& [key, v] : hs) {
      std::uint32_t idx = std::uint32_t(handleKeys_.size());
      handleKeys_.push_back(key);
      VecKey stored{&handleKeys_.back()};
      hf_.insert(hl, stored, {idx, v});
    }
  }

  // Handle length of a non-root node.
  std::uint64_t handle_length(NodeRef v) const { return two_fattest(t_[t_[v].parent].depth, t_[v].depth); }

 private:
  struct HandleLabels {
    const std::vector<FpKey>* keys;
    Id unit(const std::pair<std::uint32_t, NodeRef>& p, std::uint64_t k) const { return (*keys)[p.first][k]; }
  };

  template <class Labels>
  void put_handle(const Labels& L, NodeRef v, std::uint64_t f) {
    FpKey key = L.fp(t_[v].rep, f);
    VecKey k{&key};
    HandleLabels hl{&handleKeys_};
    if (auto hit = hf_.find(hl, k)) {
      hf_.at(*hit).value.second = v;
      return;
    }
    std::uint32_t idx = std::uint32_t(handleKeys_.size());
    handleKeys_.push_back(std::move(key));
    VecKey stored{&handleKeys_.back()};
    hf_.insert(hl, stored, {idx, v});
  }

  template <class Labels>
  void set_handle(const Labels& L, NodeRef v) {
    put_handle(L, v, handle_length(v));
  }

  // After splitting the edge above e at s: the old handle belongs to
  // whichever of s, e now spans it, and the other gets a fresh one.
  template <class Labels>
  void split_handles(const Labels& L, NodeRef s, NodeRef e) {
    put_handle(L, s, handle_length(s));
    put_handle(L, e, handle_length(e));
  }

  CompactTrie<Payload> t_;
  std::vector<FpKey> handleKeys_;
  CompactTrie<std::pair<std::uint32_t, NodeRef>> hf_;  // handle key -> (key index, node)
};

}  // namespace jbt::tries
