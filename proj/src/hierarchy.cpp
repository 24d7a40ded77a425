#include "jbt/hierarchy.hpp"

#include <bit>

namespace jbt::hierarchy {

std::uint32_t lbit(Id x, Id y) {
  if (x == y) throw std::invalid_argument("lbit: arguments must differ");
  return std::uint32_t(std::countr_zero(x ^ y));
}

Id vbit(Id x, Id y) {
  std::uint32_t b = lbit(x, y);
  return 2 * Id(b) + ((x >> b) & 1);
}

Id Dictionaries::mint(int level) {
  if (counters_.size() <= std::size_t(level)) counters_.resize(level + 1, 0);
  return make_generated(level, counters_[level]++);
}

std::uint64_t Dictionaries::minted(int level) const {
  return std::size_t(level) < counters_.size() ? counters_[level] : 0;
}

Id Dictionaries::run_id(int level, Id base, std::uint64_t count, bool* created) {
  PairKey key{level, base, count};
  if (const Id* hit = pairs_.find(key)) {
    if (created) *created = false;
    return *hit;
  }
  Id id = mint(level);
  pairs_.emplace(key, id);
  if (created) *created = true;
  return id;
}

const Id* Dictionaries::find_run(int level, Id base, std::uint64_t count) const {
  return pairs_.find(PairKey{level, base, count});
}

static std::vector<Id> seq_key(int level, std::span<const Id> ids) {
  std::vector<Id> key;
  key.reserve(ids.size() + 1);
  key.push_back(Id(level));
  key.insert(key.end(), ids.begin(), ids.end());
  return key;
}

Id Dictionaries::group_id(int level, std::span<const Id> ids, bool* created) {
  auto key = seq_key(level, ids);
  if (const Id* hit = seqs_.find(key)) {
    if (created) *created = false;
    return *hit;
  }
  Id id = mint(level);
  seqs_.emplace(key, id);
  if (created) *created = true;
  return id;
}

const Id* Dictionaries::find_group(int level, std::span<const Id> ids) const {
  return seqs_.find(seq_key(level, ids));
}

bool DctState::push(Id id, bool isShort, Id* prime, Id* dprime) {
  Id p = (isShort && havePrev && prevShort) ? vbit(prevId, id) : kInf;
  Id d = (havePrev && prevPrime != kInf && p != kInf) ? vbit(prevPrime, p) : kInf;
  bool mark = h2 != kInf && h2 > h1 && h1 < d && d != kInf;
  havePrev = true;
  prevShort = isShort;
  prevId = id;
  prevPrime = p;
  h2 = h1;
  h1 = d;
  if (prime) *prime = p;
  if (dprime) *dprime = d;
  return mark;
}

std::size_t Hierarchy::block_index(int level, Pos pos) const {
  const auto& row = rows[std::min<std::size_t>(level, rows.size() - 1)].blocks;
  auto it = std::upper_bound(row.begin(), row.end(), pos,
                             [](Pos p, const Block& b) { return p < b.sbeg; });
  return std::size_t(it - row.begin()) - 1;
}

LevelRow level_zero(std::span<const Id> symbols) {
  LevelRow row;
  row.level = 0;
  row.blocks.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!is_letter(symbols[i])) throw std::invalid_argument("symbol outside the letter namespace");
    Block b;
    b.sbeg = b.send = Pos(i);
    b.id = symbols[i];
    b.level = 0;
    b.kind = BlockKind::Letter;
    row.blocks.push_back(b);
  }
  return row;
}

static Block copy_up(const Block& b, std::uint32_t index) {
  Block c = b;
  c.level = b.level + 1;
  c.kind = BlockKind::Copy;
  c.childBegin = index;
  c.childEnd = index + 1;
  return c;
}

LevelRow coalesce_runs(const LevelRow& row, IdSource& dict) {
  LevelRow out;
  out.level = row.level + 1;
  const Pos lim = short_limit(row.level);
  const auto& bs = row.blocks;
  for (std::size_t i = 0; i < bs.size();) {
    std::size_t j = i + 1;
    if (bs[i].length() <= lim)
      while (j < bs.size() && bs[j].id == bs[i].id) ++j;
    if (j - i == 1) {
      out.blocks.push_back(copy_up(bs[i], std::uint32_t(i)));
    } else {
      Block r;
      r.sbeg = bs[i].sbeg;
      r.send = bs[j - 1].send;
      r.level = out.level;
      r.kind = BlockKind::Run;
      r.runBase = bs[i].id;
      r.runCount = j - i;
      r.id = dict.run(out.level, r.runBase, r.runCount);
      r.childBegin = std::uint32_t(i);
      r.childEnd = std::uint32_t(j);
      out.blocks.push_back(r);
    }
    i = j;
  }
  return out;
}

void compute_marks(LevelRow& row) {
  const auto& bs = row.blocks;
  const std::size_t b = bs.size();
  const Pos lim = short_limit(row.level);
  row.marks.assign(b, 0);
  row.idPrime.assign(b, kInf);
  row.idDoublePrime.assign(b, kInf);
  DctState st;
  for (std::size_t i = 0; i < b; ++i) {
    bool isShort = bs[i].length() <= lim;
    bool minMark = st.push(bs[i].id, isShort, &row.idPrime[i], &row.idDoublePrime[i]);
    bool lenMark = !isShort || i + 1 == b || bs[i + 1].length() > lim;
    row.marks[i] = (minMark || lenMark) ? 1 : 0;
  }
}

LevelRow group_marked(const LevelRow& row, IdSource& dict) {
  LevelRow out;
  out.level = row.level + 1;
  const auto& bs = row.blocks;
  std::vector<Id> ids;
  std::size_t start = 0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!row.marks[i]) continue;
    if (i == start) {
      out.blocks.push_back(copy_up(bs[i], std::uint32_t(i)));
    } else {
      ids.clear();
      for (std::size_t h = start; h <= i; ++h) ids.push_back(bs[h].id);
      Block g;
      g.sbeg = bs[start].sbeg;
      g.send = bs[i].send;
      g.level = out.level;
      g.kind = BlockKind::Group;
      g.id = dict.group(out.level, ids);
      g.childBegin = std::uint32_t(start);
      g.childEnd = std::uint32_t(i + 1);
      out.blocks.push_back(g);
    }
    start = i + 1;
  }
  return out;
}

std::vector<LevelRow> build_rows(std::span<const Id> symbols, IdSource& ids) {
  if (symbols.empty()) throw std::invalid_argument("build_hierarchy: empty input");
  std::vector<LevelRow> rows;
  rows.push_back(level_zero(symbols));
  while (rows.back().blocks.size() > 1) {
    LevelRow& cur = rows.back();
    LevelRow next;
    if (cur.level % 2 == 0) {
      next = coalesce_runs(cur, ids);
    } else {
      compute_marks(cur);
      next = group_marked(cur, ids);
    }
    rows.push_back(std::move(next));
  }
  if (rows.back().level % 2 == 1) compute_marks(rows.back());
  return rows;
}

Hierarchy build_hierarchy(std::span<const Id> symbols, bool deterministic) {
  Hierarchy h{{}, Dictionaries(deterministic)};
  h.rows = build_rows(symbols, h.dict);
  return h;
}

}  // namespace jbt::hierarchy
