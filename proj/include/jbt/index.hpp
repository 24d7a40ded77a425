#pragma once

#include "jbt/fingerprint.hpp"
#include "jbt/geom.hpp"
#include "jbt/hierarchy.hpp"
#include "jbt/jiggly.hpp"
#include "jbt/tries.hpp"

namespace jbt::index {

// Anchor of a text key inside the block `node`.  In T the key starts at pos;
// in reversed-T the key is read leftwards from pos (exclusive).
struct TextPos {
  NodeRef node = kNoNode;
  Pos pos = 0;
};

// One (x, y) pair of R: a boundary inside `node` between a child prefix and
// the next child.  Runs have period = |first child| and report the rightmost
// boundary of the run.
struct PairRecord {
  NodeRef node = kNoNode;
  Pos boundary = 0;
  Pos period = 0;
  NodeRef x = kNoNode;  // node of T
  NodeRef y = kNoNode;  // node of reversed-T
};

using PairKey = hierarchy::Dictionaries::PairKey;
using PairDict = IdMap<PairKey, Id, TripleHash>;

// Edge labels of T_id: the key of a group node is [level, child ids...].
struct GroupLabels {
  const jiggly::JigglyTree* J;
  mutable NodeRef cached = kNoNode;
  mutable std::vector<Id> ids;
  Id unit(NodeRef v, std::uint64_t k) const;
};

// Edge labels and fingerprints of T (forward) and reversed-T over the text.
struct TextLabels {
  const jiggly::JigglyTree* J;
  bool reversed = false;
  Id unit(const TextPos& p, std::uint64_t k) const;
  tries::FpKey fp(const TextPos& p, std::uint64_t len) const;
};

// A text key as a z-fast query.
struct TextKey {
  const TextLabels* L;
  TextPos p;
  std::uint64_t len = 0;
  std::uint64_t length() const { return len; }
  Id unit(std::uint64_t k) const { return L->unit(p, k); }
  tries::FpKey fp(std::uint64_t l) const { return L->fp(p, l); }
};

struct Index {
  jiggly::JigglyTree J;
  PairDict pairDict;
  tries::CompactTrie<NodeRef> tid;
  tries::ZFastTrie<TextPos> fwd, rev;
  std::vector<PairRecord> records;
  geom::RangeTree<std::uint64_t> R;
  std::map<Id, std::vector<NodeRef>> letterLeaves;
  bool deterministic = false;
  bool finalized = false;

  explicit Index(bool det = false) : J(det), pairDict(det), deterministic(det) {}

  Pos n() const { return J.root == kNoNode ? 0 : J[J.root].length(); }
  GroupLabels group_labels() const { return GroupLabels{&J, kNoNode, {}}; }
  TextLabels fwd_labels() const { return {&J, false}; }
  TextLabels rev_labels() const { return {&J, true}; }

  // Leftmost group node for the sequence, verified by expansion.
  std::optional<NodeRef> find_group(int level, std::span<const Id> ids) const;
};

// Adds T_id, T, reversed-T entries and R pairs of a node with children.
// Children, links, lifting tables and the leftmost entry must be in place.
void register_block(Index& I, NodeRef v);

// Rebuilds lifting tables of all nodes (in order of length).
void relink_forests(jiggly::JigglyTree& J);

// Back links, trie intervals, R and letter-leaf lists.
void finalize(Index& I);

// Offline pipeline: hierarchy, jiggly tree, then per-node registration.
Index build_offline(std::span<const Id> text, bool deterministic = false);

// Canonical byte form: nodes renumbered in preorder, tries walked in key
// order, R points sorted.  Independent of construction order.
std::string canonical_bytes(const Index& I);

}  // namespace jbt::index
