#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "jbt/jiggly.hpp"

namespace testsupport {

inline std::vector<jbt::Id> to_ids(const std::string& s) {
  return std::vector<jbt::Id>(s.begin(), s.end());
}

inline std::vector<jbt::Id> random_text(std::mt19937_64& rng, std::size_t n, unsigned sigma) {
  std::vector<jbt::Id> t(n);
  for (auto& c : t) c = 'a' + rng() % sigma;
  return t;
}

// Random text built from copies of a few seeds with point mutations.
inline std::vector<jbt::Id> repetitive_text(std::mt19937_64& rng, std::size_t n, unsigned sigma) {
  std::vector<jbt::Id> seed = random_text(rng, 8 + rng() % 24, sigma);
  std::vector<jbt::Id> t;
  while (t.size() < n) {
    switch (rng() % 4) {
      case 0: t.insert(t.end(), seed.begin(), seed.end()); break;
      case 1: t.push_back('a' + rng() % sigma); break;
      case 2:
        if (!t.empty()) {
          std::size_t a = rng() % t.size(), len = 1 + rng() % std::min<std::size_t>(t.size() - a, 64);
          std::vector<jbt::Id> cp(t.begin() + a, t.begin() + a + len);
          t.insert(t.end(), cp.begin(), cp.end());
        }
        break;
      default: {
        std::size_t k = 1 + rng() % 12;
        jbt::Id c = 'a' + rng() % sigma;
        t.insert(t.end(), k, c);
      }
    }
  }
  t.resize(n);
  return t;
}

// Mixed corpus used by property tests.
inline std::vector<std::vector<jbt::Id>> corpus(std::uint64_t seed, int count, std::size_t maxLen) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<jbt::Id>> out;
  for (int i = 0; i < count; ++i) {
    std::size_t n = 1 + rng() % maxLen;
    unsigned sigma = 1 + rng() % 4;
    out.push_back(i % 2 ? random_text(rng, n, sigma) : repetitive_text(rng, n, sigma));
  }
  return out;
}

// Letters whose level-1 blocks carry no local-minimum mark, found by
// bounded depth-first search.
inline bool unmarked_chain(std::vector<jbt::Id>& w, jbt::hierarchy::DctState st, std::size_t len,
                           std::mt19937_64& rng, long& budget) {
  if (w.size() == len) return true;
  if (--budget < 0) return false;
  std::vector<jbt::Id> cand;
  const jbt::Id mask = 0x7fffffff;
  if (w.empty()) cand.push_back(rng() & mask);
  else
    for (int b = 0; b < 31; ++b) cand.push_back(((w.back() ^ (jbt::Id(1) << b)) ^ ((rng() & mask) << (b + 1))) & mask);
  std::shuffle(cand.begin(), cand.end(), rng);
  for (jbt::Id c : cand) {
    jbt::hierarchy::DctState s2 = st;
    if (s2.push(c, true, nullptr, nullptr)) continue;
    w.push_back(c);
    if (unmarked_chain(w, s2, len, rng, budget)) return true;
    w.pop_back();
  }
  return false;
}

inline std::size_t count_intermediates(const std::vector<jbt::Id>& t) {
  auto J = jbt::jiggly::build_jiggly(jbt::hierarchy::build_hierarchy(t));
  std::size_t c = 0;
  for (const auto& x : J.nodes) c += x.kind == jbt::jiggly::NodeKind::Intermediate;
  return c;
}

// Sixteen-letter chains with no local-minimum mark on level 1, found offline
// with unmarked_chain.
inline const std::vector<std::vector<jbt::Id>>& unmarked_chains() {
  static const std::vector<std::vector<jbt::Id>> chains = {
      {1694379788, 1953672972, 678604556, 685115628, 556501228, 1370171628, 866855148, 681331436,
       714885868, 795181270, 97455830, 1551412950, 285022318, 1764811171, 1454563747, 1008263587},
      {2038013657, 2119802585, 205672182, 1259986486, 236576310, 293089414, 561524870, 1244971142,
       868532358, 63225990, 449101958, 180666502, 78692486, 1263117574, 10590438, 1219664102},
      {449643305, 2030835001, 363089378, 1000623586, 1468525618, 419181734, 718659686, 114679910,
       1979327590, 1942889574, 1875780710, 210166886, 938248550, 145102182, 1755714918, 842667366},
      {1322840695, 311326967, 866255195, 1860305243, 866943323, 1930330459, 696492379, 912499035,
       444344443, 2054957179, 515905147, 1014609531, 1643755131, 1039775355, 396080763, 664516219},
  };
  return chains;
}

// Texts whose jiggly trees contain intermediate nodes: a long unmarked
// chain repeated with a mutation near its start, inside random filler.
inline std::vector<std::vector<jbt::Id>> intermediate_texts(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<jbt::Id>> out;
  while (int(out.size()) < count) {
    const auto& w = unmarked_chains()[rng() % unmarked_chains().size()];
    std::vector<jbt::Id> t = random_text(rng, rng() % 20, 4);
    for (int k = 0; k < 4; ++k) t.push_back(5000 + k);
    t.insert(t.end(), w.begin(), w.end());
    int copies = 1 + int(rng() % 3);
    for (int c = 0; c < copies; ++c) {
      for (int k = 0; k < 4; ++k) t.push_back(6000 + k);
      auto w2 = w;
      w2[4] = rng() & 0x7fffffff;
      t.insert(t.end(), w2.begin(), w2.end());
      for (int k = 0; k < 4; ++k) t.push_back(6000 + k);
      auto filler = random_text(rng, rng() % 30, 3);
      t.insert(t.end(), filler.begin(), filler.end());
    }
    if (count_intermediates(t) > 0) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace testsupport
