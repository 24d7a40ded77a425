#include "jbt/serialize.hpp"

#include <fstream>
#include <sstream>

#include <zlib.h>

namespace jbt::serialize {

using index::Index;
using index::TextPos;
using jiggly::JNode;
using jiggly::NodeKind;

namespace {

constexpr char kMagic[4] = {'J', 'B', 'T', 'X'};
constexpr std::uint64_t kFlagDeterministic = 1;

enum Section : std::uint64_t {
  kNodes = 1,
  kLeftmost,
  kPairs,
  kGroupTrie,
  kForwardTrie,
  kReverseTrie,
  kRecords,
  kRPoints,
  kLifting,
  kBackLinks,
  kLetterLeaves,
};

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("index file: " + what); }

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
  void ref(NodeRef v) { u(v == kNoNode ? 0 : std::uint64_t(v) + 1); }
  void section(std::uint64_t tag, const Writer& body) {
    u(tag);
    u(body.out.size());
    out += body.out;
  }
};

struct Reader {
  std::string_view in;
  std::size_t at = 0;
  bool done() const { return at == in.size(); }
  std::uint64_t u() {
    std::uint64_t x = 0;
    for (int shift = 0;; shift += 7) {
      if (at >= in.size()) fail("truncated varint");
      if (shift > 63) fail("varint overflow");
      std::uint8_t b = std::uint8_t(in[at++]);
      x |= std::uint64_t(b & 0x7f) << shift;
      if (!(b & 0x80)) return x;
    }
  }
  std::int64_t s() {
    std::uint64_t z = u();
    return std::int64_t(z >> 1) ^ -std::int64_t(z & 1);
  }
  NodeRef ref(std::size_t limit) {
    std::uint64_t x = u();
    if (x == 0) return kNoNode;
    if (x - 1 >= limit) fail("node reference out of range");
    return NodeRef(x - 1);
  }
  // A count that must fit in the remaining bytes (each item takes >= 1 byte).
  std::size_t count() {
    std::uint64_t c = u();
    if (c > in.size() - at) fail("count exceeds section size");
    return std::size_t(c);
  }
  Reader section(std::uint64_t tag) {
    if (u() != tag) fail("unexpected section " + std::to_string(tag));
    std::uint64_t len = u();
    if (len > in.size() - at) fail("truncated section");
    Reader r{in.substr(at, len)};
    at += len;
    return r;
  }
  void end() const {
    if (!done()) fail("trailing bytes in section");
  }
};

// ---- tries ----

void put(Writer& w, NodeRef v) { w.ref(v); }
void put(Writer& w, const TextPos& p) {
  w.ref(p.node);
  w.s(p.pos);
}
void get(Reader& r, NodeRef& v, std::size_t n) { v = r.ref(n); }
void get(Reader& r, TextPos& p, std::size_t n) {
  p.node = r.ref(n);
  p.pos = r.s();
}

template <class P>
void write_trie(Writer& w, const tries::CompactTrie<P>& t) {
  w.u(t.size());
  for (const auto& x : t.nodes()) {
    w.ref(x.parent);
    w.u(x.depth);
    w.u(x.children.size());
    for (const auto& [unit, c] : x.children) {
      w.u(unit);
      w.ref(c);
    }
    put(w, x.rep);
    w.u(x.terminal);
    if (x.terminal) put(w, x.value);
  }
}

template <class P>
tries::CompactTrie<P> read_trie(Reader& r, std::size_t jNodes) {
  tries::CompactTrie<P> t;
  std::size_t n = r.count();
  if (n == 0) fail("trie without root");
  auto& nodes = t.nodes();
  nodes.resize(n);
  for (auto& x : nodes) {
    x.parent = r.ref(n);
    x.depth = r.u();
    std::size_t k = r.count();
    for (std::size_t i = 0; i < k; ++i) {
      Id unit = r.u();
      NodeRef c = r.ref(n);
      if (c == kNoNode) fail("missing trie child");
      x.children.emplace(unit, c);
    }
    get(r, x.rep, jNodes);
    x.terminal = r.u() != 0;
    if (x.terminal) get(r, x.value, jNodes);
  }
  return t;
}

void write_handles(Writer& w, const std::vector<std::pair<tries::FpKey, NodeRef>>& hs) {
  w.u(hs.size());
  for (const auto& [key, v] : hs) {
    w.u(key.size());
    for (auto x : key) w.u(x);
    w.ref(v);
  }
}

std::vector<std::pair<tries::FpKey, NodeRef>> read_handles(Reader& r, std::size_t trieNodes) {
  std::vector<std::pair<tries::FpKey, NodeRef>> hs(r.count());
  for (auto& [key, v] : hs) {
    key.resize(r.count());
    for (auto& x : key) x = r.u();
    v = r.ref(trieNodes);
  }
  return hs;
}

void check_node(const JNode& x) {
  if (std::uint64_t(x.kind) > std::uint64_t(NodeKind::Intermediate)) fail("bad node kind");
  if (x.send < x.sbeg) fail("bad node span");
  for (NodeRef c : x.children)
    if (c == kNoNode) fail("missing child");
  if ((x.kind == NodeKind::Copy || x.kind == NodeKind::Intermediate) && x.link == kNoNode) fail("missing link");
}

}  // namespace

std::uint32_t checksum(std::string_view bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  for (std::size_t left = bytes.size(); left > 0;) {
    uInt step = uInt(std::min<std::size_t>(left, 1u << 30));
    c = crc32(c, p, step);
    p += step;
    left -= step;
  }
  return std::uint32_t(c);
}

std::string save(const Index& I) {
  if (!I.finalized) throw std::logic_error("index is not finalized");
  const auto& J = I.J;
  const std::size_t N = J.nodes.size();
  Writer w;
  w.out.assign(kMagic, 4);
  w.u(kVersion);
  // Header: n, letter-namespace bound, node count, pair count, flags.
  w.u(std::uint64_t(I.n()));
  w.u(kLetterLimit);
  w.u(N);
  w.u(I.pairDict.size());
  w.u(I.deterministic ? kFlagDeterministic : 0);

  Writer b;
  b.u(N);
  b.ref(J.root);
  for (const JNode& x : J.nodes) {
    b.u(std::uint64_t(x.kind));
    b.s(x.sbeg);
    b.s(x.send);
    b.u(x.id);
    b.u(std::uint64_t(x.level));
    b.ref(x.parent);
    b.u(x.children.size());
    for (NodeRef c : x.children) b.ref(c);
    b.ref(x.link);
    b.u(x.off);
    b.u(x.r);
    b.u(x.runCount);
  }
  w.section(kNodes, b);

  b = {};
  auto lm = J.leftmost.sorted();
  b.u(lm.size());
  for (auto [id, v] : lm) {
    b.u(id);
    b.ref(v);
  }
  w.section(kLeftmost, b);

  b = {};
  auto pairs = I.pairDict.sorted();
  b.u(pairs.size());
  for (const auto& [k, id] : pairs) {
    b.u(std::uint64_t(std::get<0>(k)));
    b.u(std::get<1>(k));
    b.u(std::get<2>(k));
    b.u(id);
  }
  w.section(kPairs, b);

  b = {};
  write_trie(b, I.tid);
  w.section(kGroupTrie, b);
  b = {};
  write_trie(b, I.fwd.trie());
  write_handles(b, I.fwd.handles());
  w.section(kForwardTrie, b);
  b = {};
  write_trie(b, I.rev.trie());
  write_handles(b, I.rev.handles());
  w.section(kReverseTrie, b);

  b = {};
  b.u(I.records.size());
  for (const auto& r : I.records) {
    b.ref(r.node);
    b.s(r.boundary);
    b.s(r.period);
    b.ref(r.x);
    b.ref(r.y);
  }
  w.section(kRecords, b);

  b = {};
  b.u(I.R.size());
  for (const auto& p : I.R.points()) {
    b.u(p.x);
    b.u(p.y);
    b.u(p.payload);
  }
  w.section(kRPoints, b);

  // Parent links of both forests; the jump pointers are derived on load.
  b = {};
  for (NodeRef v = 0; v < N; ++v) {
    b.ref(J.al.parent(v));
    b.ref(J.ar.parent(v));
  }
  w.section(kLifting, b);

  b = {};
  for (NodeRef v = 0; v < N; ++v) {
    b.u(J.marked[v]);
    b.ref(J.markedAncestor[v]);
    b.u(J.copyReferrers[v].size());
    for (NodeRef c : J.copyReferrers[v]) b.ref(c);
    b.u(J.intervalSets[v].size());
    for (const auto& iv : J.intervalSets[v]) {
      b.s(iv.lo);
      b.s(iv.hi);
      b.ref(iv.referrer);
    }
  }
  w.section(kBackLinks, b);

  b = {};
  b.u(I.letterLeaves.size());
  for (const auto& [c, vs] : I.letterLeaves) {
    b.u(c);
    b.u(vs.size());
    for (NodeRef v : vs) b.ref(v);
  }
  w.section(kLetterLeaves, b);

  std::uint32_t h = checksum(w.out);
  for (int k = 0; k < 4; ++k) w.out.push_back(char((h >> (8 * k)) & 0xff));
  return std::move(w.out);
}

Index load(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) fail("bad magic");
  std::string_view body = bytes.substr(0, bytes.size() - 4);
  std::uint32_t stored = 0;
  for (int k = 0; k < 4; ++k) stored |= std::uint32_t(std::uint8_t(bytes[body.size() + k])) << (8 * k);
  if (stored != checksum(body)) fail("checksum mismatch");
  Reader top{body, 4};
  if (top.u() != kVersion) fail("unsupported version");
  const std::uint64_t n = top.u();
  if (top.u() != kLetterLimit) fail("different letter namespace");
  const std::uint64_t nodeCount = top.u(), pairCount = top.u(), flags = top.u();
  Index I((flags & kFlagDeterministic) != 0);
  auto& J = I.J;

  Reader r = top.section(kNodes);
  const std::size_t N = r.count();
  if (N != nodeCount) fail("node count disagrees with the header");
  J.nodes.resize(N);
  J.root = r.ref(N);
  if (J.root == kNoNode) fail("missing root");
  for (JNode& x : J.nodes) {
    x.kind = NodeKind(r.u());
    x.sbeg = r.s();
    x.send = r.s();
    x.id = r.u();
    x.level = int(r.u());
    x.parent = r.ref(N);
    x.children.resize(r.count());
    for (NodeRef& c : x.children) c = r.ref(N);
    x.link = r.ref(N);
    x.off = std::uint32_t(r.u());
    x.r = std::uint32_t(r.u());
    x.runCount = r.u();
    check_node(x);
  }
  r.end();

  r = top.section(kLeftmost);
  for (std::size_t k = r.count(); k-- > 0;) {
    Id id = r.u();
    NodeRef v = r.ref(N);
    if (v == kNoNode) fail("empty leftmost entry");
    J.leftmost.emplace(id, v);
  }
  r.end();

  r = top.section(kPairs);
  for (std::size_t k = r.count(); k-- > 0;) {
    int level = int(r.u());
    Id base = r.u();
    std::uint64_t count = r.u();
    I.pairDict.emplace({level, base, count}, r.u());
  }
  r.end();

  if (I.pairDict.size() != pairCount) fail("pair count disagrees with the header");

  r = top.section(kGroupTrie);
  I.tid = read_trie<NodeRef>(r, N);
  r.end();
  for (auto* z : {&I.fwd, &I.rev}) {
    r = top.section(z == &I.fwd ? kForwardTrie : kReverseTrie);
    auto t = read_trie<TextPos>(r, N);
    auto hs = read_handles(r, t.size());
    r.end();
    z->restore(std::move(t), hs);
  }

  r = top.section(kRecords);
  I.records.resize(r.count());
  for (auto& rec : I.records) {
    rec.node = r.ref(N);
    rec.boundary = r.s();
    rec.period = r.s();
    rec.x = r.ref(I.fwd.trie().size());
    rec.y = r.ref(I.rev.trie().size());
    if (rec.node == kNoNode || rec.x == kNoNode || rec.y == kNoNode) fail("incomplete pair record");
  }
  r.end();

  r = top.section(kRPoints);
  std::vector<geom::RangeTree<std::uint64_t>::Point> pts(r.count());
  for (auto& p : pts) {
    p.x = r.u();
    p.y = r.u();
    p.payload = r.u();
    if (p.payload >= I.records.size()) fail("R point without record");
  }
  r.end();

  r = top.section(kLifting);
  std::vector<std::pair<NodeRef, NodeRef>> parents(N);
  for (auto& [a, b] : parents) {
    a = r.ref(N);
    b = r.ref(N);
  }
  r.end();
  std::vector<NodeRef> order(N);
  for (NodeRef v = 0; v < N; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](NodeRef a, NodeRef b) { return J[a].length() < J[b].length(); });
  for (NodeRef v : order) {
    for (NodeRef u : {parents[v].first, parents[v].second})
      if (u != kNoNode && J[u].length() >= J[v].length()) fail("lifting parent is not shorter");
    J.al.add(v, parents[v].first);
    J.ar.add(v, parents[v].second);
  }

  r = top.section(kBackLinks);
  J.marked.resize(N);
  J.markedAncestor.resize(N);
  J.copyReferrers.resize(N);
  J.intervalSets.resize(N);
  for (NodeRef v = 0; v < N; ++v) {
    J.marked[v] = std::uint8_t(r.u() != 0);
    J.markedAncestor[v] = r.ref(N);
    J.copyReferrers[v].resize(r.count());
    for (NodeRef& c : J.copyReferrers[v]) c = r.ref(N);
    J.intervalSets[v].resize(r.count());
    for (auto& iv : J.intervalSets[v]) {
      iv.lo = r.s();
      iv.hi = r.s();
      iv.referrer = r.ref(N);
    }
  }
  r.end();

  r = top.section(kLetterLeaves);
  for (std::size_t k = r.count(); k-- > 0;) {
    Id c = r.u();
    auto& vs = I.letterLeaves[c];
    vs.resize(r.count());
    for (NodeRef& v : vs) {
      v = r.ref(N);
      if (v == kNoNode) fail("empty letter leaf");
    }
  }
  r.end();
  top.end();

  I.fwd.trie().finalize();
  I.rev.trie().finalize();
  for (const auto& p : pts) {
    const auto& rec = I.records[p.payload];
    if (p.x != I.fwd.trie()[rec.x].lo || p.y != I.rev.trie()[rec.y].lo) fail("R point disagrees with the tries");
  }
  I.R = geom::RangeTree<std::uint64_t>(std::move(pts));
  I.finalized = true;
  if (std::uint64_t(I.n()) != n) fail("text length disagrees with the header");
  return I;
}

void save_file(const Index& I, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string bytes = save(I);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Index load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load(ss.str());
}

}  // namespace jbt::serialize
