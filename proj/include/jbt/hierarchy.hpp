#pragma once

#include <span>

#include "jbt/common.hpp"

namespace jbt::hierarchy {

enum class BlockKind : std::uint8_t { Letter, Run, Group, Copy };

struct Block {
  Pos sbeg = 0;
  Pos send = 0;  // inclusive
  Id id = 0;
  int level = 0;
  BlockKind kind = BlockKind::Letter;
  Id runBase = 0;
  std::uint64_t runCount = 0;
  // Children on the row below: [childBegin, childEnd).  Copies have one child.
  std::uint32_t childBegin = 0;
  std::uint32_t childEnd = 0;

  Pos length() const { return send - sbeg + 1; }
};

struct LevelRow {
  int level = 0;
  std::vector<Block> blocks;
  // Filled by compute_marks on odd levels.
  std::vector<std::uint8_t> marks;
  std::vector<Id> idPrime;
  std::vector<Id> idDoublePrime;
};

// Assigns identifiers to new run and group blocks.
class IdSource {
 public:
  virtual ~IdSource() = default;
  virtual Id run(int level, Id base, std::uint64_t count) = 0;
  virtual Id group(int level, std::span<const Id> ids) = 0;
};

// Registries for run and group identifiers.  Keys include the level on which
// the block is minted; counters are per level (see make_generated).
class Dictionaries : public IdSource {
 public:
  explicit Dictionaries(bool deterministic = false)
      : pairs_(deterministic), seqs_(deterministic) {}

  // Run identifier for `count` copies of `base`, minted on `level` (odd).
  Id run_id(int level, Id base, std::uint64_t count, bool* created = nullptr);
  const Id* find_run(int level, Id base, std::uint64_t count) const;
  // Group identifier for the id sequence, minted on `level` (even).
  Id group_id(int level, std::span<const Id> ids, bool* created = nullptr);
  const Id* find_group(int level, std::span<const Id> ids) const;

  Id run(int level, Id base, std::uint64_t count) override { return run_id(level, base, count); }
  Id group(int level, std::span<const Id> ids) override { return group_id(level, ids); }

  Id mint(int level);
  std::uint64_t minted(int level) const;
  bool deterministic() const { return pairs_.ordered(); }

  using PairKey = std::tuple<int, Id, std::uint64_t>;
  const IdMap<PairKey, Id, TripleHash>& pairs() const { return pairs_; }
  const IdMap<std::vector<Id>, Id, VecHash>& seqs() const { return seqs_; }

 private:
  IdMap<PairKey, Id, TripleHash> pairs_;
  IdMap<std::vector<Id>, Id, VecHash> seqs_;  // key = [level, ids...]
  std::vector<std::uint64_t> counters_;
};

struct Hierarchy {
  std::vector<LevelRow> rows;
  Dictionaries dict;

  const LevelRow& top() const { return rows.back(); }
  std::size_t n() const { return rows.empty() ? 0 : rows[0].blocks.size(); }
  // Index in rows[level] of the block containing text position pos.
  std::size_t block_index(int level, Pos pos) const;
};

std::uint32_t lbit(Id x, Id y);
Id vbit(Id x, Id y);

LevelRow level_zero(std::span<const Id> symbols);
LevelRow coalesce_runs(const LevelRow& row, IdSource& ids);
void compute_marks(LevelRow& row);
LevelRow group_marked(const LevelRow& row, IdSource& ids);
// All rows up to the first single-block row.
std::vector<LevelRow> build_rows(std::span<const Id> symbols, IdSource& ids);
Hierarchy build_hierarchy(std::span<const Id> symbols, bool deterministic = false);

// id' and id'' of a block from the ids/lengths of the blocks before it.
// Shared by the offline rows, the streaming queues and the fingerprint scan.
struct DctState {
  bool havePrev = false;
  bool prevShort = false;
  Id prevId = 0;
  Id prevPrime = kInf;
  Id h2 = kInf;  // id'' two blocks back
  Id h1 = kInf;  // id'' one block back

  // Feeds the next block; returns whether condition (b) marks it.
  bool push(Id id, bool isShort, Id* prime = nullptr, Id* dprime = nullptr);
};

}  // namespace jbt::hierarchy
