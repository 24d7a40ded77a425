#include "jbt/checks.hpp"

#include <bit>

#include "jbt/fingerprint.hpp"

namespace jbt::checks {

std::uint64_t tiling_violations(const hierarchy::Hierarchy& h, std::span<const Id> text) {
  std::uint64_t bad = 0;
  const Pos n = Pos(text.size());
  for (std::size_t l = 0; l < h.rows.size(); ++l) {
    const auto& row = h.rows[l].blocks;
    Pos at = 0;
    for (const auto& b : row) {
      bad += b.sbeg != at;
      at = b.send + 1;
      if (l == 0) {
        bad += b.length() != 1 || text[b.sbeg] != b.id;
        continue;
      }
      const auto& below = h.rows[l - 1].blocks;
      if (b.childBegin >= b.childEnd || b.childEnd > below.size()) {
        ++bad;
        continue;
      }
      bad += below[b.childBegin].sbeg != b.sbeg || below[b.childEnd - 1].send != b.send;
    }
    bad += at != n;
  }
  return bad;
}

BoundaryReport boundary_counts(const hierarchy::Hierarchy& h, std::mt19937_64& rng, int windows) {
  BoundaryReport rep;
  const Pos n = Pos(h.n());
  if (n == 0) return rep;
  // starts[l][p] = number of blocks on level l starting before p.
  std::vector<std::vector<std::uint32_t>> starts(h.rows.size(), std::vector<std::uint32_t>(n + 1, 0));
  for (std::size_t l = 0; l < h.rows.size(); ++l) {
    auto& s = starts[l];
    for (const auto& b : h.rows[l].blocks) s[b.sbeg + 1] = 1;
    for (Pos p = 1; p <= n; ++p) s[p] += s[p - 1];
  }
  auto count = [&](std::size_t l, Pos i, Pos j) -> std::uint64_t {
    return l < starts.size() ? starts[l][j] - starts[l][i] : 0;
  };
  for (int w = 0; w < windows; ++w) {
    // Window lengths spread over all scales.
    Pos maxLen = Pos(1) << (rng() % (std::bit_width(std::uint64_t(n)) + 1));
    Pos len = 1 + Pos(rng() % std::min<std::uint64_t>(maxLen, n));
    Pos i = Pos(rng() % (n - len + 1)), j = i + len;
    ++rep.windows;
    for (std::size_t k = 0; 2 * k < h.rows.size(); ++k) {
      std::uint64_t c = count(2 * k, i, j) + count(2 * k + 1, i, j);
      std::uint64_t unit = k >= 62 ? 1 : std::uint64_t((len + (Pos(1) << k) - 1) >> k);
      if (c > 64 * unit) ++rep.violations;
      rep.maxRatio = std::max(rep.maxRatio, double(c) / double(unit));
    }
  }
  return rep;
}

std::uint64_t fingerprint_disagreements(const index::Index& I, std::span<const Id> text, std::mt19937_64& rng,
                                        int samples) {
  const Pos n = Pos(text.size());
  fingerprint::TreeSource src(I.J);
  std::uint64_t bad = 0;
  for (int k = 0; k < samples; ++k) {
    Pos len = 1 + Pos(rng() % std::min<std::uint64_t>(n, 64));
    Pos a = Pos(rng() % (n - len + 1)), b = Pos(rng() % (n - len + 1));
    if (k % 2)
      for (int tries = 0; tries < 32 && text[b] != text[a]; ++tries) b = Pos(rng() % (n - len + 1));
    bool same = std::equal(text.begin() + a, text.begin() + a + len, text.begin() + b);
    bool fpSame = fingerprint::fingerprint_tree(src, a, a + len) == fingerprint::fingerprint_tree(src, b, b + len);
    bad += same != fpSame;
  }
  return bad;
}

}  // namespace jbt::checks
