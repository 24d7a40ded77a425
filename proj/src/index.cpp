#include "jbt/index.hpp"

namespace jbt::index {

using jiggly::JNode;
using jiggly::NodeKind;

Id GroupLabels::unit(NodeRef v, std::uint64_t k) const {
  if (k == 0) return Id((*J)[v].level);
  if (cached != v) {
    ids.clear();
    for (const auto& c : jiggly::expand_children(*J, v)) ids.push_back(c.id);
    cached = v;
  }
  return ids.at(k - 1);
}

Id TextLabels::unit(const TextPos& p, std::uint64_t k) const {
  Pos at = reversed ? p.pos - 1 - Pos(k) : p.pos + Pos(k);
  return jiggly::letter_at(*J, p.node, at);
}

tries::FpKey TextLabels::fp(const TextPos& p, std::uint64_t len) const {
  fingerprint::TreeSource src(*J, p.node);
  Pos a = reversed ? p.pos - Pos(len) : p.pos;
  return fingerprint::fin(src, a, a + Pos(len)).key();
}

namespace {

struct SeqKey {
  std::vector<std::uint64_t> v;
  std::uint64_t length() const { return v.size(); }
  Id unit(std::uint64_t k) const { return v[k]; }
};

SeqKey group_key(int level, std::span<const Id> ids) {
  SeqKey k;
  k.v.reserve(ids.size() + 1);
  k.v.push_back(Id(level));
  k.v.insert(k.v.end(), ids.begin(), ids.end());
  return k;
}

}  // namespace

std::optional<NodeRef> Index::find_group(int level, std::span<const Id> ids) const {
  auto hit = tid.find(group_labels(), group_key(level, ids));
  if (!hit) return std::nullopt;
  return tid[*hit].value;
}

void register_block(Index& I, NodeRef v) {
  const JNode& B = I.J[v];
  TextLabels fl = I.fwd_labels(), rl = I.rev_labels();
  // T gets the child starting at childStart; reversed-T gets the leftLen
  // letters ending at boundary.
  auto add_pair = [&](Pos childStart, Pos childLen, Pos leftLen, Pos boundary, Pos period) {
    TextKey xk{&fl, {v, childStart}, std::uint64_t(childLen)};
    TextKey yk{&rl, {v, boundary}, std::uint64_t(leftLen)};
    NodeRef x = I.fwd.insert(fl, xk, xk.p);
    NodeRef y = I.rev.insert(rl, yk, yk.p);
    I.records.push_back({v, boundary, period, x, y});
  };
  if (B.kind == NodeKind::Run) {
    const JNode& c = I.J[B.children.at(0)];
    Pos len = c.length();
    Pos boundary = B.sbeg + Pos(B.runCount - 1) * len;
    add_pair(B.sbeg, len, boundary - B.sbeg, boundary, len);
    return;
  }
  if (B.kind != NodeKind::Group) return;
  std::vector<Id> ids;
  for (const auto& c : jiggly::expand_children(I.J, v)) ids.push_back(c.id);
  I.tid.insert(I.group_labels(), group_key(B.level, ids), v);
  for (std::size_t h = 1; h < B.children.size(); ++h) {
    const JNode& c = I.J[B.children[h]];
    add_pair(c.sbeg, c.length(), c.sbeg - B.sbeg, c.sbeg, 0);
  }
}

void relink_forests(jiggly::JigglyTree& J) {
  J.al = {};
  J.ar = {};
  std::vector<NodeRef> order(J.nodes.size());
  for (NodeRef v = 0; v < order.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeRef a, NodeRef b) { return J[a].length() < J[b].length(); });
  for (NodeRef v : order) jiggly::link_forests(J, v);
}

void finalize(Index& I) {
  jiggly::finalize_links(I.J);
  I.fwd.trie().finalize();
  I.rev.trie().finalize();
  std::vector<geom::RangeTree<std::uint64_t>::Point> pts;
  pts.reserve(I.records.size());
  for (std::size_t k = 0; k < I.records.size(); ++k) {
    const auto& r = I.records[k];
    pts.push_back({I.fwd.trie()[r.x].lo, I.rev.trie()[r.y].lo, k});
  }
  I.R = geom::RangeTree<std::uint64_t>(std::move(pts));
  I.letterLeaves.clear();
  for (NodeRef v = 0; v < I.J.nodes.size(); ++v)
    if (I.J[v].kind == NodeKind::Letter) I.letterLeaves[I.J[v].id].push_back(v);
  I.finalized = true;
}

Index build_offline(std::span<const Id> text, bool deterministic) {
  hierarchy::Hierarchy h = hierarchy::build_hierarchy(text, deterministic);
  Index I(deterministic);
  I.J = jiggly::build_jiggly(h);
  for (const auto& [k, id] : h.dict.pairs().sorted()) I.pairDict.emplace(k, id);
  for (NodeRef v = 0; v < I.J.nodes.size(); ++v)
    if (I.J[v].has_children()) register_block(I, v);
  finalize(I);
  return I;
}

// ---- canonical form ----

namespace {

struct Writer {
  std::string out;
  void u(std::uint64_t x) {
    do {
      std::uint8_t b = x & 0x7f;
      x >>= 7;
      out.push_back(char(b | (x ? 0x80 : 0)));
    } while (x);
  }
  void s(std::int64_t x) { u((std::uint64_t(x) << 1) ^ std::uint64_t(x >> 63)); }
};

template <class P>
void write_trie(Writer& w, const tries::CompactTrie<P>& t) {
  std::vector<NodeRef> stack{t.root()};
  w.u(t.size());
  while (!stack.empty()) {
    NodeRef v = stack.back();
    stack.pop_back();
    const auto& x = t[v];
    w.u(x.depth);
    w.u(x.terminal);
    w.u(x.children.size());
    for (const auto& [unit, c] : x.children) w.u(unit);
    for (auto it = x.children.rbegin(); it != x.children.rend(); ++it) stack.push_back(it->second);
  }
}

}  // namespace

std::string canonical_bytes(const Index& I) {
  const auto& J = I.J;
  Writer w;
  w.out = "JBTC";
  // Preorder renumbering.
  std::vector<NodeRef> order, num(J.nodes.size(), kNoNode);
  if (J.root != kNoNode) {
    std::vector<NodeRef> stack{J.root};
    while (!stack.empty()) {
      NodeRef v = stack.back();
      stack.pop_back();
      num[v] = NodeRef(order.size());
      order.push_back(v);
      for (auto it = J[v].children.rbegin(); it != J[v].children.rend(); ++it) stack.push_back(*it);
    }
  }
  auto ref = [&](NodeRef v) -> std::uint64_t { return v == kNoNode ? 0 : std::uint64_t(num.at(v)) + 1; };
  w.u(order.size());
  w.u(J.nodes.size());
  for (NodeRef v : order) {
    const JNode& x = J[v];
    w.u(std::uint64_t(x.kind));
    w.s(x.sbeg);
    w.s(x.send);
    w.u(x.id);
    w.u(std::uint64_t(x.level));
    w.u(ref(x.parent));
    w.u(x.children.size());
    for (NodeRef c : x.children) w.u(ref(c));
    w.u(ref(x.link));
    w.u(x.off);
    w.u(x.r);
    w.u(x.runCount);
    w.u(ref(J.al.parent(v)));
    w.u(ref(J.ar.parent(v)));
    if (I.finalized) {
      w.u(ref(J.markedAncestor[v]));
      w.u(J.marked[v]);
      std::vector<std::uint64_t> refs;
      for (NodeRef c : J.copyReferrers[v]) refs.push_back(ref(c));
      std::sort(refs.begin(), refs.end());
      w.u(refs.size());
      for (auto c : refs) w.u(c);
      std::vector<std::tuple<Pos, Pos, std::uint64_t>> iv;
      for (const auto& r : J.intervalSets[v]) iv.emplace_back(r.lo, r.hi, ref(r.referrer));
      std::sort(iv.begin(), iv.end());
      w.u(iv.size());
      for (auto [lo, hi, r] : iv) {
        w.s(lo);
        w.s(hi);
        w.u(r);
      }
    }
  }
  auto lm = J.leftmost.sorted();
  w.u(lm.size());
  for (auto [id, v] : lm) {
    w.u(id);
    w.u(ref(v));
  }
  auto pd = I.pairDict.sorted();
  w.u(pd.size());
  for (const auto& [k, id] : pd) {
    w.u(std::uint64_t(std::get<0>(k)));
    w.u(std::get<1>(k));
    w.u(std::get<2>(k));
    w.u(id);
  }
  write_trie(w, I.tid);
  write_trie(w, I.fwd.trie());
  write_trie(w, I.rev.trie());
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, Pos, Pos>> pts;
  for (const auto& r : I.records) {
    std::uint64_t x = I.fwd.trie().finalized() ? I.fwd.trie()[r.x].lo : 0;
    std::uint64_t y = I.rev.trie().finalized() ? I.rev.trie()[r.y].lo : 0;
    pts.emplace_back(x, y, ref(r.node), r.boundary, r.period);
  }
  std::sort(pts.begin(), pts.end());
  w.u(pts.size());
  for (auto [x, y, v, b, p] : pts) {
    w.u(x);
    w.u(y);
    w.u(v);
    w.s(b);
    w.s(p);
  }
  w.u(I.letterLeaves.size());
  for (const auto& [c, leaves] : I.letterLeaves) {
    std::vector<std::uint64_t> refs;
    for (NodeRef v : leaves) refs.push_back(ref(v));
    std::sort(refs.begin(), refs.end());
    w.u(c);
    w.u(refs.size());
    for (auto r : refs) w.u(r);
  }
  return w.out;
}

}  // namespace jbt::index
