#pragma once

#include <array>

#include "jbt/hierarchy.hpp"

namespace jbt::jiggly {

enum class NodeKind : std::uint8_t { Letter, Run, Group, Copy, Intermediate };

struct JNode {
  Pos sbeg = 0;
  Pos send = 0;  // inclusive
  Id id = 0;     // unused for intermediate nodes
  int level = 0; // creation level of id; for intermediate nodes the level of the replaced blocks
  NodeKind kind = NodeKind::Letter;
  NodeRef parent = kNoNode;
  std::vector<NodeRef> children;
  NodeRef link = kNoNode;  // copy target, or the block an intermediate node points into
  std::uint32_t off = 0;   // intermediate: first replaced child index inside link
  std::uint32_t r = 0;     // intermediate: number of replaced children
  std::uint64_t runCount = 0;

  Pos length() const { return send - sbeg + 1; }
  bool has_children() const { return !children.empty(); }
};

// One child of a block in the full hierarchy.
struct ChildBlock {
  Id id = 0;
  Pos start = 0;
  Pos len = 0;
};

enum class Side : std::uint8_t { Left, Right };

// Parent links of A_L or A_R with binary lifting tables.
class LiftingForest {
 public:
  static constexpr int kLog = 8;  // chains are bounded by the level count (< 256)

  void add(NodeRef v, NodeRef parent);
  NodeRef parent(NodeRef v) const { return v < up_.size() ? up_[v][0] : kNoNode; }
  std::size_t size() const { return up_.size(); }

  // Farthest ancestor-or-self a of v with pred(a); pred must be monotone
  // (true on a prefix of the chain).  kNoNode if pred(v) fails.
  template <class Pred>
  NodeRef farthest(NodeRef v, Pred pred) const {
    if (v == kNoNode || !pred(v)) return kNoNode;
    for (int j = kLog - 1; j >= 0; --j) {
      NodeRef u = up_[v][j];
      if (u != kNoNode && pred(u)) v = u;
    }
    return v;
  }

 private:
  std::vector<std::array<NodeRef, kLog>> up_;
};

// Marked-ancestor and back-link data used for secondary occurrences.
struct IntervalRef {
  Pos lo = 0;  // relative to the target's sbeg, half-open
  Pos hi = 0;
  NodeRef referrer = kNoNode;
};

struct JigglyTree {
  std::vector<JNode> nodes;
  NodeRef root = kNoNode;
  IdMap<Id, NodeRef> leftmost;
  LiftingForest al, ar;

  // Filled by finalize_links.
  std::vector<std::vector<NodeRef>> copyReferrers;
  std::vector<std::vector<IntervalRef>> intervalSets;
  std::vector<NodeRef> markedAncestor;  // nearest marked proper ancestor
  std::vector<std::uint8_t> marked;

  explicit JigglyTree(bool deterministic = false) : leftmost(deterministic) {}

  const JNode& operator[](NodeRef v) const { return nodes[v]; }
  NodeRef add(JNode node);
  // The representative (leftmost node with children, or a letter node) for an id.
  NodeRef rep(Id id) const;
};

// Offline construction.
struct Subrange {
  std::uint32_t m = 0;    // row index of the first block
  std::uint32_t r = 1;    // number of blocks
  std::uint32_t mpp = 0;  // smallest index with the same r-block right context (r > 1)
};

std::vector<Id> rleft(const hierarchy::LevelRow& row, std::size_t m, std::size_t len);
std::vector<Id> rright(const hierarchy::LevelRow& row, std::size_t m, std::size_t len);

// Brute-force greedy subrange parser over one marked odd row.
class SubrangeOracle {
 public:
  explicit SubrangeOracle(const hierarchy::LevelRow& row) : row_(row) {}
  std::vector<Subrange> parse(std::size_t i, std::size_t j);

 private:
  const std::vector<std::int64_t>& first_context(std::size_t r);
  const std::vector<std::int64_t>& first_right(std::size_t r);
  const hierarchy::LevelRow& row_;
  std::map<std::size_t, std::vector<std::int64_t>> ctx_, right_;
};

std::vector<Subrange> parse_subranges(const hierarchy::LevelRow& row, std::size_t i, std::size_t j);

JigglyTree build_jiggly(const hierarchy::Hierarchy& h);

// Navigation.
std::vector<ChildBlock> expand_children(const JigglyTree& J, NodeRef v);
std::vector<ChildBlock> expand_slice(const JigglyTree& J, NodeRef v, std::size_t lo, std::size_t hi);
std::size_t child_count(const JigglyTree& J, NodeRef v);
// Hierarchy child of v containing relative position rel (start relative to v).
ChildBlock child_at(const JigglyTree& J, NodeRef v, Pos rel);
// Total length of the first k hierarchy children of v.
Pos prefix_length(const JigglyTree& J, NodeRef v, std::size_t k);
std::vector<Id> expand_string(const JigglyTree& J, NodeRef v);
Id letter_at(const JigglyTree& J, NodeRef v, Pos pos);
std::size_t intermediate_depth(const JigglyTree& J, NodeRef v);

NodeRef weighted_ancestor(const JigglyTree& J, Side side, NodeRef v, Pos w);

// Adds the A_L/A_R links of a node whose children (or link) are in place.
void link_forests(JigglyTree& J, NodeRef v);
// Reverse links, interval sets and marked ancestors (after construction).
void finalize_links(JigglyTree& J);

}  // namespace jbt::jiggly
