#pragma once

#include "jbt/hierarchy.hpp"
#include "jbt/jiggly.hpp"
#include "jbt/tries.hpp"

namespace jbt::fingerprint {

struct Element {
  Id id = 0;
  std::uint64_t count = 1;
  Pos baseLen = 0;
  Pos offset = 0;  // relative to the substring start

  bool operator==(const Element& o) const { return id == o.id && count == o.count; }
};

struct Fingerprint {
  std::vector<Element> elements;

  tries::FpKey key() const;
  Pos length() const;
  bool operator==(const Fingerprint& o) const { return elements == o.elements; }
};

// A hierarchy block as seen by the fingerprint procedure.
struct Blk {
  Id id = 0;
  Pos start = 0;
  Pos len = 0;
  Pos end() const { return start + len; }
};

// Blocks of a materialized hierarchy (text or pattern rows).  Levels above
// the top resolve to the top block.
class RowSource {
 public:
  explicit RowSource(const std::vector<hierarchy::LevelRow>& rows) : rows_(&rows) {}
  Blk at(int level, Pos pos) const;

 private:
  const std::vector<hierarchy::LevelRow>* rows_;
};

// Blocks of the text hierarchy emulated over the jiggly tree.  Keeps the last
// root-to-block path as a cache; long descents along first or last children
// jump with the A_L/A_R lifting tables.
class TreeSource {
 public:
  explicit TreeSource(const jiggly::JigglyTree& J);
  // Emulates only the subtree of `top`; intervals must lie inside it.
  TreeSource(const jiggly::JigglyTree& J, NodeRef top);
  Blk at(int level, Pos pos) const;
  std::uint64_t descents() const { return descents_; }

 private:
  struct Entry {
    Blk b;
    int lo = 0;  // levels [lo, hi] on which this block exists
    int hi = 0;
  };
  void descend(int level, Pos pos) const;

  const jiggly::JigglyTree* J_;
  mutable std::vector<Entry> stack_;
  mutable std::uint64_t descents_ = 0;
};

// fin over the blocks tiling [X, Y) on level 0 of the source's hierarchy.
template <class Source>
Fingerprint fin(const Source& src, Pos X, Pos Y);

// Direct transcription of the recursive definition over explicit rows; the
// test oracle for fin.
Fingerprint fin_reference(const std::vector<hierarchy::LevelRow>& rows, Pos X, Pos Y);

Fingerprint fingerprint_rows(const std::vector<hierarchy::LevelRow>& rows, Pos X, Pos Y);
Fingerprint fingerprint_tree(const TreeSource& src, Pos X, Pos Y);

}  // namespace jbt::fingerprint
