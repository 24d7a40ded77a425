#include "jbt/jiggly.hpp"

namespace jbt::jiggly {

using hierarchy::BlockKind;
using hierarchy::Hierarchy;
using hierarchy::LevelRow;

void LiftingForest::add(NodeRef v, NodeRef parent) {
  if (up_.size() <= v) {
    std::array<NodeRef, kLog> none;
    none.fill(kNoNode);
    up_.resize(v + 1, none);
  }
  up_[v][0] = parent;
  for (int j = 1; j < kLog; ++j) {
    NodeRef u = up_[v][j - 1];
    up_[v][j] = u == kNoNode ? kNoNode : up_[u][j - 1];
  }
}

NodeRef JigglyTree::add(JNode node) {
  nodes.push_back(std::move(node));
  return NodeRef(nodes.size() - 1);
}

NodeRef JigglyTree::rep(Id id) const {
  const NodeRef* v = leftmost.find(id);
  if (!v) throw std::logic_error("no leftmost block for id");
  return *v;
}

// ---- contexts and the brute-force parser ----

static std::size_t range_start(const LevelRow& row, std::size_t m) {
  std::size_t i = m;
  while (i > 0 && !row.marks[i - 1]) --i;
  return i;
}

std::vector<Id> rleft(const LevelRow& row, std::size_t m, std::size_t len) {
  std::size_t i = range_start(row, m);
  std::size_t h = std::min(len, m - i);
  std::vector<Id> out;
  out.reserve(h + 1);
  for (std::size_t t = 1; t <= h; ++t) out.push_back(row.blocks[m - t].id);
  if (h < len) out.push_back(kDollar);
  return out;
}

std::vector<Id> rright(const LevelRow& row, std::size_t m, std::size_t len) {
  std::vector<Id> out;
  out.reserve(len + 1);
  std::size_t t = m;
  while (out.size() < len && t < row.blocks.size()) {
    out.push_back(row.blocks[t].id);
    if (row.marks[t]) break;
    ++t;
  }
  if (out.size() < len) out.push_back(kEndMark);
  return out;
}

static std::vector<std::int64_t> first_by_key(std::size_t b, const std::function<std::vector<Id>(std::size_t)>& key) {
  std::unordered_map<std::vector<Id>, std::int64_t, VecHash> first;
  std::vector<std::int64_t> out(b);
  for (std::size_t m = 0; m < b; ++m) out[m] = first.emplace(key(m), std::int64_t(m)).first->second;
  return out;
}

const std::vector<std::int64_t>& SubrangeOracle::first_context(std::size_t r) {
  auto it = ctx_.find(r);
  if (it != ctx_.end()) return it->second;
  auto key = [&](std::size_t m) {
    std::vector<Id> k = rleft(row_, m, 4 * r);
    k.push_back(kInf);
    std::vector<Id> rr = rright(row_, m, 5 * r);
    k.insert(k.end(), rr.begin(), rr.end());
    return k;
  };
  return ctx_.emplace(r, first_by_key(row_.blocks.size(), key)).first->second;
}

const std::vector<std::int64_t>& SubrangeOracle::first_right(std::size_t r) {
  auto it = right_.find(r);
  if (it != right_.end()) return it->second;
  auto key = [&](std::size_t m) { return rright(row_, m, r); };
  return right_.emplace(r, first_by_key(row_.blocks.size(), key)).first->second;
}

std::vector<Subrange> SubrangeOracle::parse(std::size_t i, std::size_t j) {
  std::vector<Subrange> out;
  std::size_t m = i;
  while (m <= j) {
    // A match for r+1 implies one for r, so extend while possible.
    std::size_t r = 1;
    while (m + r <= j && first_context(r + 1)[m] < std::int64_t(m)) ++r;
    Subrange s{std::uint32_t(m), std::uint32_t(r), std::uint32_t(m)};
    if (r > 1) s.mpp = std::uint32_t(first_right(r)[m]);
    out.push_back(s);
    m += r;
  }
  return out;
}

std::vector<Subrange> parse_subranges(const LevelRow& row, std::size_t i, std::size_t j) {
  SubrangeOracle oracle(row);
  return oracle.parse(i, j);
}

// ---- navigation ----

static std::size_t count_impl(const JigglyTree& J, NodeRef v) {
  const JNode& x = J[v];
  switch (x.kind) {
    case NodeKind::Letter: return 0;
    case NodeKind::Run: return x.runCount;
    case NodeKind::Copy: return count_impl(J, x.link);
    case NodeKind::Intermediate: return x.r;
    case NodeKind::Group: {
      std::size_t c = 0;
      for (NodeRef u : x.children) c += J[u].kind == NodeKind::Intermediate ? J[u].r : 1;
      return c;
    }
  }
  return 0;
}

std::size_t child_count(const JigglyTree& J, NodeRef v) { return count_impl(J, v); }

// Length of the first k hierarchy children of v.
static Pos prefix_len(const JigglyTree& J, NodeRef v, std::size_t k) {
  const JNode& x = J[v];
  switch (x.kind) {
    case NodeKind::Letter: return 0;
    case NodeKind::Run: return k ? Pos(k) * J[x.children[0]].length() : 0;
    case NodeKind::Copy: return prefix_len(J, x.link, k);
    case NodeKind::Intermediate: return prefix_len(J, x.link, x.off + k) - prefix_len(J, x.link, x.off);
    case NodeKind::Group: {
      std::size_t idx = 0;
      for (NodeRef u : x.children) {
        const JNode& c = J[u];
        std::size_t cnt = c.kind == NodeKind::Intermediate ? c.r : 1;
        if (idx + cnt > k) {
          Pos rel = c.sbeg - x.sbeg;
          return k == idx ? rel : rel + prefix_len(J, u, k - idx);
        }
        idx += cnt;
      }
      return x.length();
    }
  }
  return 0;
}

Pos prefix_length(const JigglyTree& J, NodeRef v, std::size_t k) { return prefix_len(J, v, k); }

ChildBlock child_at(const JigglyTree& J, NodeRef v, Pos rel) {
  const JNode& x = J[v];
  switch (x.kind) {
    case NodeKind::Letter: throw std::logic_error("child_at: letter has no children");
    case NodeKind::Run: {
      const JNode& c = J[x.children[0]];
      Pos len = c.length();
      return {c.id, (rel / len) * len, len};
    }
    case NodeKind::Copy: return child_at(J, x.link, rel);
    case NodeKind::Intermediate: {
      Pos base = prefix_len(J, x.link, x.off);
      ChildBlock c = child_at(J, x.link, base + rel);
      c.start -= base;
      return c;
    }
    case NodeKind::Group: {
      Pos at = x.sbeg + rel;
      auto it = std::upper_bound(x.children.begin(), x.children.end(), at,
                                 [&](Pos p, NodeRef u) { return p < J[u].sbeg; });
      NodeRef u = *std::prev(it);
      const JNode& c = J[u];
      Pos off = c.sbeg - x.sbeg;
      if (c.kind != NodeKind::Intermediate) return {c.id, off, c.length()};
      ChildBlock inner = child_at(J, u, at - c.sbeg);
      inner.start += off;
      return inner;
    }
  }
  throw std::logic_error("child_at: bad node");
}

// Ids and lengths of hierarchy children [lo, hi) of v.
static void collect(const JigglyTree& J, NodeRef v, std::size_t lo, std::size_t hi,
                    std::vector<std::pair<Id, Pos>>& out) {
  if (lo >= hi) return;
  const JNode& x = J[v];
  switch (x.kind) {
    case NodeKind::Letter: return;
    case NodeKind::Run: {
      const JNode& c = J[x.children[0]];
      hi = std::min<std::size_t>(hi, x.runCount);
      for (std::size_t t = lo; t < hi; ++t) out.emplace_back(c.id, c.length());
      return;
    }
    case NodeKind::Copy: collect(J, x.link, lo, hi, out); return;
    case NodeKind::Intermediate:
      hi = std::min<std::size_t>(hi, x.r);
      collect(J, x.link, x.off + lo, x.off + hi, out);
      return;
    case NodeKind::Group: {
      std::size_t idx = 0;
      for (NodeRef u : x.children) {
        if (idx >= hi) break;
        const JNode& c = J[u];
        if (c.kind == NodeKind::Intermediate) {
          std::size_t a = std::max(lo, idx), b = std::min(hi, idx + c.r);
          if (a < b) collect(J, u, a - idx, b - idx, out);
          idx += c.r;
        } else {
          if (idx >= lo) out.emplace_back(c.id, c.length());
          ++idx;
        }
      }
      return;
    }
  }
}

std::vector<ChildBlock> expand_slice(const JigglyTree& J, NodeRef v, std::size_t lo, std::size_t hi) {
  std::vector<std::pair<Id, Pos>> raw;
  collect(J, v, lo, hi, raw);
  std::vector<ChildBlock> out;
  out.reserve(raw.size());
  Pos at = J[v].sbeg + (raw.empty() ? 0 : prefix_len(J, v, lo));
  for (auto [id, len] : raw) {
    out.push_back({id, at, len});
    at += len;
  }
  return out;
}

std::vector<ChildBlock> expand_children(const JigglyTree& J, NodeRef v) {
  return expand_slice(J, v, 0, child_count(J, v));
}

static void expand_into(const JigglyTree& J, NodeRef v, std::vector<Id>& out) {
  if (J[v].kind == NodeKind::Letter) {
    out.push_back(J[v].id);
    return;
  }
  std::vector<std::pair<Id, Pos>> raw;
  collect(J, v, 0, child_count(J, v), raw);
  for (auto [id, len] : raw) {
    if (is_letter(id)) out.push_back(id);
    else expand_into(J, J.rep(id), out);
  }
}

std::vector<Id> expand_string(const JigglyTree& J, NodeRef v) {
  std::vector<Id> out;
  out.reserve(std::size_t(J[v].length()));
  expand_into(J, v, out);
  return out;
}

Id letter_at(const JigglyTree& J, NodeRef v, Pos pos) {
  Pos rel = pos - J[v].sbeg;
  if (rel < 0 || rel >= J[v].length()) throw std::out_of_range("letter_at");
  while (J[v].kind != NodeKind::Letter) {
    auto kids = expand_children(J, v);
    Pos at = J[v].sbeg + rel;
    auto it = std::upper_bound(kids.begin(), kids.end(), at,
                               [](Pos p, const ChildBlock& c) { return p < c.start; });
    const ChildBlock& c = *std::prev(it);
    rel = at - c.start;
    if (is_letter(c.id)) return c.id;
    v = J.rep(c.id);
  }
  return J[v].id;
}

std::size_t intermediate_depth(const JigglyTree& J, NodeRef v) {
  std::size_t d = 0;
  while (v != kNoNode && J[v].kind == NodeKind::Intermediate) {
    v = J[v].link;
    ++d;
  }
  return d;
}

NodeRef weighted_ancestor(const JigglyTree& J, Side side, NodeRef v, Pos w) {
  const LiftingForest& f = side == Side::Left ? J.al : J.ar;
  return f.farthest(v, [&](NodeRef u) { return J[u].length() >= w; });
}

void link_forests(JigglyTree& J, NodeRef v) {
  if (J[v].kind == NodeKind::Letter) {
    J.al.add(v, kNoNode);
    J.ar.add(v, kNoNode);
    return;
  }
  std::size_t cnt = child_count(J, v);
  std::vector<std::pair<Id, Pos>> first, last;
  collect(J, v, 0, 1, first);
  collect(J, v, cnt - 1, cnt, last);
  // Letters end the chains: they never exist above the levels asked for.
  auto up = [&](Id id) { return is_letter(id) ? kNoNode : J.rep(id); };
  J.al.add(v, up(first.at(0).first));
  J.ar.add(v, up(last.at(0).first));
}

void finalize_links(JigglyTree& J) {
  std::size_t N = J.nodes.size();
  J.copyReferrers.assign(N, {});
  J.intervalSets.assign(N, {});
  J.marked.assign(N, 0);
  J.markedAncestor.assign(N, kNoNode);
  for (NodeRef v = 0; v < N; ++v) {
    const JNode& x = J[v];
    if (x.kind == NodeKind::Copy) J.copyReferrers[x.link].push_back(v);
    if (x.kind == NodeKind::Intermediate)
      J.intervalSets[x.link].push_back({prefix_len(J, x.link, x.off), prefix_len(J, x.link, x.off + x.r), v});
  }
  for (NodeRef v = 0; v < N; ++v) {
    auto& s = J.intervalSets[v];
    std::sort(s.begin(), s.end(), [](const IntervalRef& a, const IntervalRef& b) {
      return std::tie(a.lo, a.hi, a.referrer) < std::tie(b.lo, b.hi, b.referrer);
    });
    J.marked[v] = !J.copyReferrers[v].empty() || !s.empty() ||
                  (J[v].kind == NodeKind::Run && J[v].has_children());
  }
  if (J.root == kNoNode) return;
  std::vector<NodeRef> stack{J.root};
  while (!stack.empty()) {
    NodeRef u = stack.back();
    stack.pop_back();
    NodeRef up = J.marked[u] ? u : J.markedAncestor[u];
    for (NodeRef c : J[u].children) {
      J.markedAncestor[c] = up;
      stack.push_back(c);
    }
  }
}

// ---- offline construction ----

namespace {

struct OfflineBuilder {
  const Hierarchy& h;
  JigglyTree& J;
  std::unordered_map<Id, Pos> minSbeg;
  std::map<int, SubrangeOracle> oracles;
  struct PendingLink {
    NodeRef node;
    Id target;
  };
  std::vector<PendingLink> pending;

  NodeRef build(int level, std::size_t b, NodeRef parent) {
    const hierarchy::Block* B = &h.rows[level].blocks[b];
    while (B->kind == BlockKind::Copy) {
      --level;
      b = B->childBegin;
      B = &h.rows[level].blocks[b];
    }
    JNode node;
    node.sbeg = B->sbeg;
    node.send = B->send;
    node.id = B->id;
    node.level = level;
    node.parent = parent;
    bool leftmost = minSbeg.at(B->id) == B->sbeg;
    if (B->kind == BlockKind::Letter) {
      node.kind = NodeKind::Letter;
      NodeRef v = J.add(node);
      if (leftmost) J.leftmost.emplace(B->id, v);
      return v;
    }
    if (!leftmost) {
      node.kind = NodeKind::Copy;
      NodeRef v = J.add(node);
      pending.push_back({v, B->id});
      return v;
    }
    node.kind = B->kind == BlockKind::Run ? NodeKind::Run : NodeKind::Group;
    node.runCount = B->runCount;
    NodeRef v = J.add(node);
    J.leftmost.emplace(B->id, v);
    if (B->kind == BlockKind::Run) {
      NodeRef c = build(level - 1, B->childBegin, v);
      J.nodes[v].children.push_back(c);
      return v;
    }
    const LevelRow& row = h.rows[level - 1];
    auto it = oracles.try_emplace(level - 1, row).first;
    for (const Subrange& s : it->second.parse(B->childBegin, B->childEnd - 1)) {
      NodeRef c;
      if (s.r == 1) {
        c = build(level - 1, s.m, v);
      } else {
        const auto& first = row.blocks[s.m];
        const auto& lastb = row.blocks[s.m + s.r - 1];
        const auto& target = h.rows[level].blocks[h.block_index(level, row.blocks[s.mpp].sbeg)];
        JNode im;
        im.kind = NodeKind::Intermediate;
        im.sbeg = first.sbeg;
        im.send = lastb.send;
        im.level = level - 1;
        im.parent = v;
        im.off = s.mpp - target.childBegin;
        im.r = s.r;
        c = J.add(im);
        pending.push_back({c, target.id});
      }
      J.nodes[v].children.push_back(c);
    }
    return v;
  }
};

}  // namespace

JigglyTree build_jiggly(const Hierarchy& h) {
  JigglyTree J(h.dict.deterministic());
  OfflineBuilder ob{h, J, {}, {}, {}};
  for (const LevelRow& row : h.rows)
    for (const auto& B : row.blocks) {
      auto [it, ok] = ob.minSbeg.emplace(B.id, B.sbeg);
      if (!ok) it->second = std::min(it->second, B.sbeg);
    }
  const LevelRow& top = h.top();
  J.root = ob.build(top.level, 0, kNoNode);
  for (auto& p : ob.pending) J.nodes[p.node].link = J.rep(p.target);
  // Forest parents are strictly shorter, so link in order of length.
  std::vector<NodeRef> order(J.nodes.size());
  for (NodeRef v = 0; v < order.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeRef a, NodeRef b) { return J[a].length() < J[b].length(); });
  for (NodeRef v : order) link_forests(J, v);
  finalize_links(J);
  return J;
}

}  // namespace jbt::jiggly
