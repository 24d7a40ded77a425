#include "jbt/fingerprint.hpp"

#include <limits>

namespace jbt::fingerprint {

using hierarchy::DctState;
using hierarchy::LevelRow;

tries::FpKey Fingerprint::key() const {
  tries::FpKey k;
  k.reserve(2 * elements.size());
  for (const auto& e : elements) {
    k.push_back(e.id);
    k.push_back(e.count);
  }
  return k;
}

Pos Fingerprint::length() const {
  Pos n = 0;
  for (const auto& e : elements) n += Pos(e.count) * e.baseLen;
  return n;
}

static int id_level(Id id) { return is_letter(id) ? 0 : creation_level(id); }

Blk RowSource::at(int level, Pos pos) const {
  const auto& rows = *rows_;
  const LevelRow& row = rows[std::min<std::size_t>(level, rows.size() - 1)];
  auto it = std::upper_bound(row.blocks.begin(), row.blocks.end(), pos,
                             [](Pos p, const hierarchy::Block& b) { return p < b.sbeg; });
  const auto& b = *std::prev(it);
  return {b.id, b.sbeg, b.length()};
}

TreeSource::TreeSource(const jiggly::JigglyTree& J) : TreeSource(J, J.root) {}

TreeSource::TreeSource(const jiggly::JigglyTree& J, NodeRef top) : J_(&J) {
  const auto& r = J[top];
  stack_.push_back({{r.id, r.sbeg, r.length()}, id_level(r.id), std::numeric_limits<int>::max()});
}

void TreeSource::descend(int level, Pos pos) const {
  const auto& J = *J_;
  for (;;) {
    Entry cur = stack_.back();
    if (cur.lo <= level) return;
    ++descents_;
    NodeRef a = J.rep(cur.b.id);
    // Jump along first or last children while the block still covers pos
    // and exists above the wanted level.
    Pos fromStart = pos - cur.b.start, fromEnd = cur.b.end() - 1 - pos;
    auto pred = [&](Pos off) {
      return [&, off](NodeRef u) { return J[u].length() > off && id_level(J[u].id) > level; };
    };
    NodeRef u = J.al.farthest(a, pred(fromStart));
    if (u != a && u != kNoNode) {
      int l = id_level(J[u].id);
      stack_.push_back({{J[u].id, cur.b.start, J[u].length()}, l, l});
      continue;
    }
    u = J.ar.farthest(a, pred(fromEnd));
    if (u != a && u != kNoNode) {
      int l = id_level(J[u].id);
      stack_.push_back({{J[u].id, cur.b.end() - J[u].length(), J[u].length()}, l, l});
      continue;
    }
    jiggly::ChildBlock c = jiggly::child_at(J, a, fromStart);
    stack_.push_back({{c.id, cur.b.start + c.start, c.len}, id_level(c.id), cur.lo - 1});
  }
}

Blk TreeSource::at(int level, Pos pos) const {
  while (stack_.size() > 1) {
    const Entry& e = stack_.back();
    if (e.b.start <= pos && pos < e.b.end() && e.hi >= level) break;
    stack_.pop_back();
  }
  if (pos < stack_[0].b.start || pos >= stack_[0].b.end()) throw std::out_of_range("TreeSource: position outside text");
  descend(level, pos);
  return stack_.back().b;
}

namespace {

[[noreturn]] void misaligned() { throw std::logic_error("fin: blocks not aligned with the interval"); }

}  // namespace

template <class Source>
Fingerprint fin(const Source& src, Pos X, Pos Y) {
  const Pos X0 = X;
  std::vector<Element> left, right;
  auto plain = [&](const Blk& b) { return Element{b.id, 1, b.len, b.start - X0}; };
  for (int level = 0; X < Y; ++level) {
    const Pos lim = short_limit(level);
    if (level % 2 == 0) {
      Blk b1 = src.at(level, X);
      if (b1.start != X) misaligned();
      Pos E = X;
      if (b1.len <= lim) {
        E = std::min(src.at(level + 1, X).end(), Y);
        left.push_back({b1.id, std::uint64_t((E - X) / b1.len), b1.len, X - X0});
        if (E == Y) break;
      }
      Blk bb = src.at(level, Y - 1);
      if (bb.end() != Y) misaligned();
      Pos S = Y;
      if (bb.len <= lim) {
        S = std::max(src.at(level + 1, Y - 1).start, X);
        right.push_back({bb.id, std::uint64_t((Y - S) / bb.len), bb.len, S - X0});
      }
      X = E;
      Y = S;
      continue;
    }
    // Odd level: smallest i from the left.
    std::vector<Blk> L;
    DctState st;
    std::size_t i = 0;
    bool found = false;
    for (Pos cur = X; cur < Y;) {
      Blk b = src.at(level, cur);
      if (b.start != cur) misaligned();
      if (b.len > lim) {
        i = L.size();
        found = true;
        L.push_back(b);
        break;
      }
      L.push_back(b);
      if (st.push(b.id, true, nullptr, nullptr)) {
        i = L.size();
        found = true;
        break;
      }
      cur = b.end();
    }
    if (!found) {
      for (const auto& b : L) left.push_back(plain(b));
      break;
    }
    for (std::size_t k = 0; k < i; ++k) left.push_back(plain(L[k]));
    Pos Xn = i == 0 ? X : L[i - 1].end();
    // Largest j from the right; R[t] is B_{b-t}.
    std::vector<Blk> R;
    auto fetch = [&](std::size_t t) {
      while (R.size() <= t) {
        Pos p = R.empty() ? Y : R.back().start;
        if (p <= X) return false;
        Blk b = src.at(level, p - 1);
        if (b.end() != p) misaligned();
        R.push_back(b);
      }
      return true;
    };
    std::size_t t = 0;
    for (;; ++t) {
      if (!fetch(t)) throw std::logic_error("fin: right scan passed the left boundary");
      if (R[t].len > lim) break;
      // Local id'' needs up to four blocks to the left (fewer at B_1).
      std::size_t back = t;
      while (back < t + 4 && fetch(back + 1)) ++back;
      DctState rs;
      bool mark = false;
      for (std::size_t k = back + 1; k-- > t;) {
        bool isShort = R[k].len <= lim;
        mark = rs.push(R[k].id, isShort, nullptr, nullptr);
      }
      if (mark) break;
    }
    Pos Yn = R[t].end();
    for (std::size_t k = 0; k < t; ++k) right.push_back(plain(R[k]));
    if (Yn < Xn) throw std::logic_error("fin: crossing scans");
    X = Xn;
    Y = Yn;
  }
  Fingerprint fp;
  fp.elements = std::move(left);
  fp.elements.insert(fp.elements.end(), right.rbegin(), right.rend());
  return fp;
}

template Fingerprint fin<RowSource>(const RowSource&, Pos, Pos);
template Fingerprint fin<TreeSource>(const TreeSource&, Pos, Pos);

Fingerprint fingerprint_rows(const std::vector<LevelRow>& rows, Pos X, Pos Y) { return fin(RowSource(rows), X, Y); }
Fingerprint fingerprint_tree(const TreeSource& src, Pos X, Pos Y) { return fin(src, X, Y); }

// ---- literal transcription of the definition ----

namespace {

std::vector<Blk> blocks_in(const std::vector<LevelRow>& rows, int level, Pos X, Pos Y) {
  const LevelRow& row = rows[std::min<std::size_t>(level, rows.size() - 1)];
  std::vector<Blk> out;
  for (const auto& b : row.blocks)
    if (b.sbeg >= X && b.send < Y) out.push_back({b.id, b.sbeg, b.length()});
  Pos covered = 0;
  for (const auto& b : out) covered += b.len;
  if (covered != Y - X) throw std::logic_error("fin_reference: interval not aligned");
  return out;
}

void fin_rec(const std::vector<LevelRow>& rows, int level, const std::vector<Blk>& B, Pos X0,
             std::vector<Element>& out) {
  const std::size_t b = B.size();
  if (b == 0) return;
  const Pos lim = short_limit(level);
  auto el = [&](const Blk& x, std::uint64_t c) { return Element{x.id, c, x.len, x.start - X0}; };
  if (level % 2 == 0) {
    std::size_t i = 0;
    while (i < b && B[i].len <= lim && B[i].id == B[0].id) ++i;
    if (i == b) {
      out.push_back(el(B[0], b));
      return;
    }
    std::size_t j = b;
    while (j > 0 && B[j - 1].len <= lim && B[j - 1].id == B[b - 1].id) --j;
    if (i > 0) out.push_back(el(B[0], i));
    if (i < j) {
      Pos X = B[i].start, Y = B[j - 1].end();
      fin_rec(rows, level + 1, blocks_in(rows, level + 1, X, Y), X0, out);
    }
    if (j < b) out.push_back(el(B[j], b - j));
    return;
  }
  // Local id'' with 1-based indices.
  std::vector<Id> d(b + 1, kInf);
  DctState st;
  std::vector<std::uint8_t> minAt(b + 1, 0);
  for (std::size_t h = 1; h <= b; ++h) minAt[h] = st.push(B[h - 1].id, B[h - 1].len <= lim, nullptr, &d[h]);
  auto isLong = [&](std::size_t h) { return B[h - 1].len > lim; };
  std::size_t i = b, j = b;
  for (std::size_t c = 0; c <= b; ++c) {
    if ((c < b && isLong(c + 1)) || (c >= 3 && minAt[c])) {
      i = c;
      break;
    }
  }
  bool jFound = false;
  for (std::size_t c = b; c >= 1; --c) {
    if (isLong(c) || (c >= 3 && minAt[c])) {
      j = c;
      jFound = true;
      break;
    }
  }
  if (!jFound) j = b;
  for (std::size_t h = 1; h <= i; ++h) out.push_back(el(B[h - 1], 1));
  if (i < j) {
    Pos X = B[i].start, Y = B[j - 1].end();
    fin_rec(rows, level + 1, blocks_in(rows, level + 1, X, Y), X0, out);
  }
  for (std::size_t h = j + 1; h <= b; ++h) out.push_back(el(B[h - 1], 1));
}

}  // namespace

Fingerprint fin_reference(const std::vector<LevelRow>& rows, Pos X, Pos Y) {
  Fingerprint fp;
  if (X < Y) fin_rec(rows, 0, blocks_in(rows, 0, X, Y), X, fp.elements);
  return fp;
}

}  // namespace jbt::fingerprint
