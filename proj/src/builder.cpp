#include "jbt/builder.hpp"

#include <deque>
#include <unordered_map>

namespace jbt::builder {

using geom::OrderList;
using index::Index;
using jiggly::JNode;
using jiggly::NodeKind;

namespace {

// A finished block travelling up the level queues.  `node` is its jiggly
// node when this instance is the leftmost block with its id.
struct SBlock {
  Id id = 0;
  Pos sbeg = 0;
  Pos len = 0;
  NodeRef node = kNoNode;
  std::uint64_t row = 0;  // index in its level row
  Pos end() const { return sbeg + len; }
};

int id_level(Id id) { return is_letter(id) ? 0 : creation_level(id); }

// Ids of a closed range; context keys point into these.
struct StoredRange {
  int level = 0;
  std::vector<Id> ids;
};

struct CtxPayload {
  std::uint32_t range = 0;
  std::uint32_t q = 0;
};

// Keys of T-circle: [level, ids[q..], END]; of reversed T-circle:
// [level, ids[q-1], ..., ids[0], $].
struct CtxLabels {
  const std::vector<StoredRange>* ranges;
  bool reversed;
  Id unit(const CtxPayload& p, std::uint64_t k) const {
    const StoredRange& R = (*ranges)[p.range];
    if (k == 0) return Id(R.level);
    if (!reversed) {
      std::uint64_t idx = p.q + k - 1;
      return idx < R.ids.size() ? R.ids[idx] : kEndMark;
    }
    return k - 1 < p.q ? R.ids[p.q - k] : kDollar;
  }
};

struct SeqKey {
  std::vector<Id> v;
  std::uint64_t length() const { return v.size(); }
  Id unit(std::uint64_t k) const { return v[k]; }
};

// Compacted trie whose nodes carry open/close items of an Euler tour kept in
// an order list, so subtrees are order-list intervals.
class ContextTrie {
 public:
  ContextTrie(const std::vector<StoredRange>& ranges, bool reversed) : L_{&ranges, reversed} {
    open_.push_back(ol_.insert_after(OrderList::kHead));
    close_.push_back(ol_.insert_after(open_[0]));
  }

  NodeRef insert(const SeqKey& key, CtxPayload p) {
    const std::uint64_t n = key.length();
    NodeRef v = t_.root();
    std::uint64_t d = 0;
    while (d < n) {
      Id u = key.unit(d);
      NodeRef c = t_.child(v, u);
      if (c == kNoNode) {
        NodeRef leaf = t_.add_leaf(v, u, n, p);
        place(leaf, v, u);
        v = leaf;
        break;
      }
      std::uint64_t depth = t_[c].depth, e = std::min(depth, n), k = d + 1;
      while (k < e && L_.unit(t_[c].rep, k) == key.unit(k)) ++k;
      if (k < depth) {
        NodeRef s = t_.split(c, k, L_.unit(t_[c].rep, k));
        grow(s);
        open_[s] = ol_.insert_before(open_[c]);
        close_[s] = ol_.insert_after(close_[c]);
        c = s;
      }
      v = c;
      d = k;
    }
    auto& node = t_.at(v);
    if (!node.terminal) {
      node.terminal = true;
      node.value = p;
    }
    return v;
  }

  std::optional<NodeRef> locus(const SeqKey& key) const { return t_.descend(L_, key); }
  OrderList::Item open(NodeRef v) const { return open_[v]; }
  OrderList::Item close(NodeRef v) const { return close_[v]; }
  const OrderList& order() const { return ol_; }
  std::size_t size() const { return t_.size(); }

 private:
  void grow(NodeRef v) {
    if (open_.size() <= v) {
      open_.resize(v + 1);
      close_.resize(v + 1);
    }
  }
  // Euler items of a new leaf go right after its preceding sibling's subtree.
  void place(NodeRef leaf, NodeRef parent, Id unit) {
    const auto& ch = t_[parent].children;
    auto it = ch.find(unit);
    OrderList::Item after = it == ch.begin() ? open_[parent] : close_[std::prev(it)->second];
    grow(leaf);
    open_[leaf] = ol_.insert_after(after);
    close_[leaf] = ol_.insert_after(open_[leaf]);
  }

  CtxLabels L_;
  tries::CompactTrie<CtxPayload> t_;
  OrderList ol_;
  std::vector<OrderList::Item> open_, close_;
};

struct Level {
  std::uint64_t received = 0;
  // Even levels: the pending block and its repetition count.
  bool hasPending = false;
  SBlock pending;
  std::uint64_t runLen = 0;
  // Odd levels: blocks since the last mark; the newest block's mark waits
  // for the next block's length.
  hierarchy::DctState dct;
  std::vector<SBlock> range;
  bool lastMin = false;
  std::uint64_t peak = 0;
};

}  // namespace

struct StreamBuilder::Impl {
  Index I;
  bool record;
  BuildStats stats;
  std::vector<ParseRecord> parses;
  std::deque<Level> levels;
  std::vector<std::uint64_t> counters;
  std::unordered_map<Id, Pos> firstLetter;
  std::vector<StoredRange> ranges;
  ContextTrie fwdCtx, revCtx;
  geom::DynamicPointSet P;
  // (level, row) of every point in P -> (group node, child index).
  std::unordered_map<std::uint64_t, std::pair<NodeRef, std::uint32_t>> rowOwner;
  Pos fed = 0;
  bool finished = false;

  Impl(bool det, bool rec)
      : I(det), record(rec), fwdCtx(ranges, false), revCtx(ranges, true), P(fwdCtx.order(), revCtx.order()) {}

  static std::uint64_t row_key(int level, std::uint64_t row) { return (std::uint64_t(level) << 48) | row; }

  Id mint(int level) {
    if (counters.size() <= std::size_t(level)) counters.resize(level + 1, 0);
    return make_generated(level, counters[level]++);
  }

  Level& level(int l) {
    while (levels.size() <= std::size_t(l)) levels.emplace_back();
    return levels[l];
  }

  void feed_letter(Id c) {
    if (finished) throw std::logic_error("builder already finished");
    if (!is_letter(c)) throw std::invalid_argument("symbol outside the letter namespace");
    firstLetter.emplace(c, fed);
    SBlock b{c, fed, 1, kNoNode, 0};
    ++fed;
    ++stats.letters;
    push(0, b);
  }

  void push(int l, SBlock b) {
    Level& L = level(l);
    b.row = L.received++;
    if (l % 2 == 0) even_step(l, b);
    else odd_step(l, b);
  }

  // ---- jiggly nodes ----

  NodeRef child_node(const SBlock& c, NodeRef parent) {
    auto& J = I.J;
    if (is_letter(c.id)) {
      JNode x;
      x.sbeg = x.send = c.sbeg;
      x.id = c.id;
      x.kind = NodeKind::Letter;
      x.parent = parent;
      NodeRef v = J.add(x);
      jiggly::link_forests(J, v);
      if (firstLetter.at(c.id) == c.sbeg) J.leftmost.emplace(c.id, v);
      return v;
    }
    if (c.node != kNoNode) {
      J.nodes[c.node].parent = parent;
      return c.node;
    }
    JNode x;
    x.sbeg = c.sbeg;
    x.send = c.end() - 1;
    x.id = c.id;
    x.level = id_level(c.id);
    x.kind = NodeKind::Copy;
    x.parent = parent;
    x.link = J.rep(c.id);
    NodeRef v = J.add(x);
    jiggly::link_forests(J, v);
    return v;
  }

  void register_node(NodeRef v) {
    I.J.leftmost.emplace(I.J[v].id, v);
    jiggly::link_forests(I.J, v);
    index::register_block(I, v);
  }

  // ---- even levels: runs ----

  void even_step(int l, const SBlock& b) {
    Level& L = levels[l];
    L.peak = std::max<std::uint64_t>(L.peak, 1);
    if (L.hasPending && b.id == L.pending.id && L.pending.len <= short_limit(l)) {
      ++L.runLen;
      return;
    }
    if (L.hasPending) emit_even(l);
    L.pending = b;
    L.runLen = 1;
    L.hasPending = true;
  }

  void emit_even(int l) {
    Level& L = levels[l];
    SBlock first = L.pending;
    std::uint64_t r = L.runLen;
    L.hasPending = false;
    if (r == 1) {
      push(l + 1, first);
      return;
    }
    const int out = l + 1;
    index::PairKey key{out, first.id, r};
    SBlock run{0, first.sbeg, first.len * Pos(r), kNoNode, 0};
    if (const Id* hit = I.pairDict.find(key)) {
      run.id = *hit;
    } else {
      run.id = mint(out);
      I.pairDict.emplace(key, run.id);
      JNode x;
      x.sbeg = run.sbeg;
      x.send = run.end() - 1;
      x.id = run.id;
      x.level = out;
      x.kind = NodeKind::Run;
      x.runCount = r;
      NodeRef v = I.J.add(x);
      NodeRef c = child_node(first, v);
      I.J.nodes[v].children.push_back(c);
      register_node(v);
      run.node = v;
    }
    push(out, run);
  }

  // ---- odd levels: marks and groups ----

  void odd_step(int l, const SBlock& b) {
    Level& L = levels[l];
    const Pos lim = short_limit(l);
    const bool isShort = b.len <= lim;
    const bool minMark = L.dct.push(b.id, isShort);
    if (!L.range.empty() && (L.lastMin || L.range.back().len > lim || !isShort)) close_range(l);
    L.range.push_back(b);
    L.lastMin = minMark;
    L.peak = std::max<std::uint64_t>(L.peak, L.range.size());
  }

  void close_range(int l) {
    Level& L = levels[l];
    std::vector<SBlock> blocks;
    blocks.swap(L.range);
    if (blocks.size() == 1) {
      push(l + 1, blocks[0]);
      return;
    }
    const int out = l + 1;
    std::vector<Id> ids;
    for (const auto& b : blocks) ids.push_back(b.id);
    SBlock g{0, blocks.front().sbeg, blocks.back().end() - blocks.front().sbeg, kNoNode, 0};
    if (auto hit = I.find_group(out, ids)) {
      g.id = I.J[*hit].id;
      ++stats.groupHits;
    } else {
      ++stats.groupMisses;
      g.id = mint(out);
      g.node = build_group(l, blocks, ids, g);
    }
    push(out, g);
  }

  NodeRef build_group(int l, const std::vector<SBlock>& blocks, const std::vector<Id>& ids, const SBlock& g) {
    auto& J = I.J;
    JNode x;
    x.sbeg = g.sbeg;
    x.send = g.end() - 1;
    x.id = g.id;
    x.level = l + 1;
    x.kind = NodeKind::Group;
    NodeRef v = J.add(x);
    const std::uint64_t base = blocks[0].row;
    for (std::size_t k = 0; k < blocks.size(); ++k) rowOwner[row_key(l, base + k)] = {v, std::uint32_t(k)};
    std::vector<NodeRef> inter;
    for (const auto& s : parse(l, ids, base)) {
      std::size_t m = s.m - base;
      NodeRef c;
      if (s.r == 1) {
        c = child_node(blocks[m], v);
      } else {
        auto [target, off] = rowOwner.at(row_key(l, s.mpp));
        JNode im;
        im.kind = NodeKind::Intermediate;
        im.sbeg = blocks[m].sbeg;
        im.send = blocks[m + s.r - 1].end() - 1;
        im.level = l;
        im.parent = v;
        im.link = target;
        im.off = off;
        im.r = std::uint32_t(s.r);
        c = J.add(im);
        inter.push_back(c);
      }
      J.nodes[v].children.push_back(c);
    }
    for (NodeRef c : inter) jiggly::link_forests(J, c);
    register_node(v);
    return v;
  }

  // ---- online subrange parsing ----

  SeqKey right_key(std::uint32_t rid, std::size_t m, std::size_t len) const {
    const StoredRange& R = ranges[rid];
    SeqKey k;
    k.v.push_back(Id(R.level));
    std::size_t e = std::min(R.ids.size(), m + len);
    k.v.insert(k.v.end(), R.ids.begin() + m, R.ids.begin() + e);
    if (e - m < len) k.v.push_back(kEndMark);
    return k;
  }

  SeqKey left_key(std::uint32_t rid, std::size_t m, std::size_t len) const {
    const StoredRange& R = ranges[rid];
    SeqKey k;
    k.v.push_back(Id(R.level));
    std::size_t h = std::min(len, m);
    for (std::size_t t = 1; t <= h; ++t) k.v.push_back(R.ids[m - t]);
    if (h < len) k.v.push_back(kDollar);
    return k;
  }

  // Some earlier position has the same left (4r) and right (5r) contexts.
  bool match(std::uint32_t rid, std::size_t m, std::size_t r) const {
    auto x = fwdCtx.locus(right_key(rid, m, 5 * r));
    if (!x) return false;
    auto y = revCtx.locus(left_key(rid, m, 4 * r));
    if (!y) return false;
    return P.any(fwdCtx.open(*x), fwdCtx.close(*x), revCtx.open(*y), revCtx.close(*y));
  }

  void insert_point(std::uint32_t rid, std::size_t q, std::uint64_t row) {
    const std::size_t n = ranges[rid].ids.size();
    NodeRef x = fwdCtx.insert(right_key(rid, q, n - q + 1), {rid, std::uint32_t(q)});
    NodeRef y = revCtx.insert(left_key(rid, q, q + 1), {rid, std::uint32_t(q)});
    P.insert(fwdCtx.open(x), revCtx.open(y), row);
  }

  std::vector<ParseRecord> parse(int l, const std::vector<Id>& ids, std::uint64_t base) {
    const std::uint32_t rid = std::uint32_t(ranges.size());
    ranges.push_back({l, ids});
    const std::size_t len = ids.size();
    std::vector<ParseRecord> out;
    for (std::size_t m = 0; m < len;) {
      std::size_t r = 1;
      while (m + r < len && match(rid, m, r + 1)) ++r;
      std::uint64_t mpp = base + m;
      if (r > 1) {
        auto x = fwdCtx.locus(right_key(rid, m, r));
        auto best = x ? P.min_payload_x(fwdCtx.open(*x), fwdCtx.close(*x)) : std::nullopt;
        if (!best) throw std::logic_error("online parser: matched context without an earlier copy");
        mpp = *best;
      }
      out.push_back({l, base + m, r, mpp});
      for (std::size_t q = m; q < m + r; ++q) insert_point(rid, q, base + q);
      m += r;
    }
    if (record) parses.insert(parses.end(), out.begin(), out.end());
    return out;
  }

  // ---- end of stream ----

  Index finish() {
    if (finished) throw std::logic_error("builder already finished");
    if (fed == 0) throw std::invalid_argument("empty stream");
    finished = true;
    int top = 0;
    for (int l = 0;; ++l) {
      Level& L = levels.at(l);
      if (L.received == 1) {
        top = l;
        break;
      }
      if (l % 2 == 0) emit_even(l);
      else close_range(l);
    }
    Level& T = levels[top];
    SBlock root = top % 2 == 0 ? T.pending : T.range.at(0);
    NodeRef r = is_letter(root.id) ? child_node(root, kNoNode) : root.node;
    if (r == kNoNode) throw std::logic_error("top block has no node");
    I.J.root = r;
    collect_stats();
    renumber();
    index::relink_forests(I.J);
    index::finalize(I);
    return std::move(I);
  }

  void collect_stats() {
    stats.blocksPerLevel.clear();
    stats.peakQueue.clear();
    for (const auto& L : levels) {
      stats.blocksPerLevel.push_back(L.received);
      stats.peakQueue.push_back(L.peak);
    }
    stats.jNodes = I.J.nodes.size();
    stats.ctxTrieNodes = fwdCtx.size() + revCtx.size();
    stats.points = P.size();
    stats.orderRelabels = fwdCtx.order().relabels() + revCtx.order().relabels();
  }

  // Arena order becomes preorder, as produced by the offline construction.
  void renumber() {
    auto& J = I.J;
    const std::size_t N = J.nodes.size();
    std::vector<NodeRef> order, perm(N, kNoNode);
    order.reserve(N);
    std::vector<NodeRef> stack{J.root};
    while (!stack.empty()) {
      NodeRef v = stack.back();
      stack.pop_back();
      perm[v] = NodeRef(order.size());
      order.push_back(v);
      for (auto it = J[v].children.rbegin(); it != J[v].children.rend(); ++it) stack.push_back(*it);
    }
    if (order.size() != N) throw std::logic_error("builder: unreachable nodes");
    auto map = [&](NodeRef v) { return v == kNoNode ? kNoNode : perm[v]; };
    std::vector<JNode> nodes(N);
    for (NodeRef k = 0; k < N; ++k) {
      JNode x = std::move(J.nodes[order[k]]);
      x.parent = map(x.parent);
      x.link = map(x.link);
      for (auto& c : x.children) c = map(c);
      nodes[k] = std::move(x);
    }
    J.nodes = std::move(nodes);
    J.root = map(J.root);
    IdMap<Id, NodeRef> lm(I.deterministic);
    for (auto [id, v] : J.leftmost.sorted()) lm.emplace(id, map(v));
    J.leftmost = std::move(lm);
    auto& tn = I.tid.nodes();
    for (NodeRef t = 1; t < tn.size(); ++t) {
      tn[t].rep = map(tn[t].rep);
      if (tn[t].terminal) tn[t].value = map(tn[t].value);
    }
    for (auto* z : {&I.fwd, &I.rev}) {
      auto& zn = z->trie().nodes();
      for (auto& x : zn) {
        x.rep.node = map(x.rep.node);
        x.value.node = map(x.value.node);
      }
    }
    for (auto& rec : I.records) rec.node = map(rec.node);
  }
};

StreamBuilder::StreamBuilder(bool deterministic, bool recordParses)
    : impl_(std::make_unique<Impl>(deterministic, recordParses)) {}
StreamBuilder::~StreamBuilder() = default;

void StreamBuilder::feed_letter(Id c) { impl_->feed_letter(c); }
index::Index StreamBuilder::finish() { return impl_->finish(); }
const BuildStats& StreamBuilder::stats() const { return impl_->stats; }
const std::vector<ParseRecord>& StreamBuilder::parses() const { return impl_->parses; }

index::Index build_streaming(std::span<const Id> text, bool deterministic, BuildStats* stats) {
  StreamBuilder b(deterministic);
  for (Id c : text) b.feed_letter(c);
  index::Index I = b.finish();
  if (stats) *stats = b.stats();
  return I;
}

}  // namespace jbt::builder
