#include "jbt/search.hpp"

#include <unordered_set>

namespace jbt::search {

using index::Index;
using jiggly::JNode;
using jiggly::NodeKind;

Id PatternIds::fresh(int level) {
  if (counters_.size() <= std::size_t(level)) counters_.resize(level + 1, 0);
  return make_generated(level, counters_[level]++, true);
}

Id PatternIds::run(int level, Id base, std::uint64_t count) {
  hierarchy::Dictionaries::PairKey key{level, base, count};
  if (!is_overlay(base))
    if (const Id* hit = I_.pairDict.find(key)) return *hit;
  auto [it, ok] = runs_.emplace(key, 0);
  if (ok) it->second = fresh(level);
  return it->second;
}

Id PatternIds::group(int level, std::span<const Id> ids) {
  if (std::none_of(ids.begin(), ids.end(), is_overlay))
    if (auto v = I_.find_group(level, ids)) return I_.J[*v].id;
  std::vector<Id> key{Id(level)};
  key.insert(key.end(), ids.begin(), ids.end());
  auto [it, ok] = groups_.emplace(std::move(key), 0);
  if (ok) it->second = fresh(level);
  return it->second;
}

PatternContext build_pattern_context(const Index& I, std::span<const Id> t) {
  if (t.empty()) throw std::invalid_argument("empty pattern");
  PatternContext ctx;
  ctx.t.assign(t.begin(), t.end());
  PatternIds ids(I);
  ctx.rows = hierarchy::build_rows(t, ids);
  ctx.overlayIds = ids.overlay_count();
  return ctx;
}

std::vector<Pos> candidate_splits(const fingerprint::Fingerprint& fp, Pos m) {
  std::vector<Pos> q;
  const auto& el = fp.elements;
  for (std::size_t i = 0; i < el.size(); ++i) {
    if (i > 0) q.push_back(el[i].offset);
    if (el[i].count > 1) {
      Pos next = i + 1 < el.size() ? el[i + 1].offset : m;
      q.push_back(next - el[i].baseLen);
    }
  }
  std::vector<Pos> out;
  for (Pos x : q)
    if (x > 0 && x < m) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Pattern slices as z-fast queries.
struct ForwardQuery {
  const PatternContext* c;
  Pos q;
  std::uint64_t length() const { return std::uint64_t(c->m() - q); }
  Id unit(std::uint64_t k) const { return c->t[q + Pos(k)]; }
  tries::FpKey fp(std::uint64_t len) const { return c->fp(q, q + Pos(len)).key(); }
};

struct ReverseQuery {
  const PatternContext* c;
  Pos q;
  std::uint64_t length() const { return std::uint64_t(q); }
  Id unit(std::uint64_t k) const { return c->t[q - 1 - Pos(k)]; }
  tries::FpKey fp(std::uint64_t len) const { return c->fp(q - Pos(len), q).key(); }
};

}  // namespace

std::vector<Occurrence> primary_occurrences(const Index& I, const PatternContext& ctx) {
  const Pos m = ctx.m();
  std::vector<Occurrence> out;
  if (m > I.n()) return out;
  if (m == 1) {
    auto it = I.letterLeaves.find(ctx.t[0]);
    if (it != I.letterLeaves.end())
      for (NodeRef v : it->second) out.push_back({I.J[v].sbeg, Provenance::Primary, v});
    return out;
  }
  std::unordered_set<Pos> seen;
  auto fl = I.fwd_labels();
  auto rl = I.rev_labels();
  for (Pos q : candidate_splits(ctx.fp(0, m), m)) {
    auto a = I.fwd.locate(fl, ForwardQuery{&ctx, q});
    if (!a) continue;
    auto c = I.rev.locate(rl, ReverseQuery{&ctx, q});
    if (!c) continue;
    auto [x1, x2] = I.fwd.trie().interval(a->node);
    auto [y1, y2] = I.rev.trie().interval(c->node);
    I.R.report(x1, x2, y1, y2, [&](const auto& pt) {
      const index::PairRecord& r = I.records[pt.payload];
      Pos p = r.boundary - q;
      bool first = true;
      do {
        if (seen.insert(p).second) out.push_back({p, first ? Provenance::Primary : Provenance::Periodic, r.node});
        first = false;
        p -= r.period;
      } while (r.period > 0 && p >= I.J[r.node].sbeg);
      return true;
    });
  }
  return out;
}

std::vector<Occurrence> secondary_occurrences(const Index& I, const std::vector<Occurrence>& primaries, Pos m) {
  const auto& J = I.J;
  std::unordered_set<Pos> seen;
  std::vector<Occurrence> work, out;
  for (const auto& o : primaries)
    if (seen.insert(o.p).second) work.push_back(o);
  auto emit = [&](Pos p, NodeRef v, Provenance k) {
    if (!seen.insert(p).second) return;
    out.push_back({p, k, v});
    work.push_back({p, k, v});
  };
  while (!work.empty()) {
    Occurrence o = work.back();
    work.pop_back();
    for (NodeRef u = o.node; u != kNoNode; u = J.markedAncestor[u]) {
      if (!J.marked[u]) continue;
      const JNode& B = J[u];
      Pos rel = o.p - B.sbeg;
      for (const auto& iv : J.intervalSets[u]) {
        if (iv.lo > rel) break;
        if (rel + m <= iv.hi) emit(J[iv.referrer].sbeg + rel - iv.lo, iv.referrer, Provenance::Secondary);
      }
      for (NodeRef c : J.copyReferrers[u]) emit(J[c].sbeg + rel, c, Provenance::Secondary);
      if (B.kind == NodeKind::Run && B.has_children()) {
        Pos period = J[B.children[0]].length();
        if (rel + m <= period)
          for (std::uint64_t k = 1; k < B.runCount; ++k) emit(o.p + Pos(k) * period, u, Provenance::Periodic);
      }
    }
  }
  return out;
}

std::vector<Occurrence> find_occurrences(const Index& I, std::span<const Id> t) {
  if (t.empty()) throw std::invalid_argument("empty pattern");
  if (!I.finalized) throw std::logic_error("index is not finalized");
  if (Pos(t.size()) > I.n()) return {};
  PatternContext ctx = build_pattern_context(I, t);
  std::vector<Occurrence> all = primary_occurrences(I, ctx);
  auto sec = secondary_occurrences(I, all, ctx.m());
  all.insert(all.end(), sec.begin(), sec.end());
  std::sort(all.begin(), all.end(), [](const Occurrence& a, const Occurrence& b) { return a.p < b.p; });
  return all;
}

std::vector<Pos> search(const Index& I, std::span<const Id> t) {
  std::vector<Pos> out;
  for (const auto& o : find_occurrences(I, t)) out.push_back(o.p);
  return out;
}

}  // namespace jbt::search
