#pragma once

#include "jbt/index.hpp"

namespace jbt::search {

// Assigns pattern block ids: the index's dictionaries first, then ids from a
// query-local namespace.  Never mutates the index.
class PatternIds : public hierarchy::IdSource {
 public:
  explicit PatternIds(const index::Index& I) : I_(I) {}
  Id run(int level, Id base, std::uint64_t count) override;
  Id group(int level, std::span<const Id> ids) override;
  std::uint64_t overlay_count() const { return runs_.size() + groups_.size(); }

 private:
  Id fresh(int level);
  const index::Index& I_;
  std::map<hierarchy::Dictionaries::PairKey, Id> runs_;
  std::map<std::vector<Id>, Id> groups_;
  std::vector<std::uint64_t> counters_;
};

struct PatternContext {
  std::vector<Id> t;
  std::vector<hierarchy::LevelRow> rows;
  std::size_t overlayIds = 0;

  Pos m() const { return Pos(t.size()); }
  fingerprint::Fingerprint fp(Pos p, Pos q) const { return fingerprint::fingerprint_rows(rows, p, q); }
};

enum class Provenance : std::uint8_t { Primary, Secondary, Periodic };

struct Occurrence {
  Pos p = 0;
  Provenance kind = Provenance::Primary;
  NodeRef node = kNoNode;  // lowest covering node of the jiggly tree
};

PatternContext build_pattern_context(const index::Index& I, std::span<const Id> t);

// Split positions q in (0, m) derived from the pattern fingerprint.
std::vector<Pos> candidate_splits(const fingerprint::Fingerprint& fp, Pos m);

std::vector<Occurrence> primary_occurrences(const index::Index& I, const PatternContext& ctx);

// Closure of the given occurrences under copy, intermediate and run links.
std::vector<Occurrence> secondary_occurrences(const index::Index& I, const std::vector<Occurrence>& primaries, Pos m);

// All occurrences with provenance, sorted by position.
std::vector<Occurrence> find_occurrences(const index::Index& I, std::span<const Id> t);

// Sorted occurrence positions.
std::vector<Pos> search(const index::Index& I, std::span<const Id> t);

}  // namespace jbt::search
