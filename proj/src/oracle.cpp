#include "jbt/oracle.hpp"

#include <numeric>
#include <string_view>
#include <unordered_set>

namespace jbt::oracle {

Rational Rational::reduced() const {
  std::uint64_t g = std::gcd(num, den);
  return g ? Rational{num / g, den / g} : *this;
}

std::string Rational::str() const {
  Rational r = reduced();
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::vector<Pos> naive_search(std::span<const Id> s, std::span<const Id> t) {
  std::vector<Pos> out;
  if (t.size() > s.size()) return out;
  for (std::size_t p = 0; p + t.size() <= s.size(); ++p)
    if (std::equal(t.begin(), t.end(), s.begin() + p)) out.push_back(Pos(p));
  return out;
}

namespace {

struct SliceHash {
  std::size_t operator()(std::span<const Id> v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (Id x : v) h = (h ^ x) * 0x100000001b3ull;
    return std::size_t(h ^ (h >> 31));
  }
};
struct SliceEq {
  bool operator()(std::span<const Id> a, std::span<const Id> b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

std::uint64_t dk(std::span<const Id> s, std::size_t k) {
  if (k == 0 || k > s.size()) throw std::invalid_argument("dk: k out of range");
  std::unordered_set<std::span<const Id>, SliceHash, SliceEq> seen;
  for (std::size_t p = 0; p + k <= s.size(); ++p) seen.insert(s.subspan(p, k));
  return seen.size();
}

// Suffix array by prefix doubling, LCP by Kasai; d_k counts suffixes of
// length >= k whose LCP with the previous suffix is < k.
std::vector<std::uint64_t> dk_table(std::span<const Id> s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> sa(n), rank(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) {
    sa[i] = i;
    rank[i] = s[i];
  }
  for (std::size_t k = 1;; k <<= 1) {
    auto key = [&](std::size_t i) { return std::pair<std::size_t, std::size_t>(rank[i], i + k < n ? rank[i + k] + 1 : 0); };
    std::sort(sa.begin(), sa.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    tmp[sa[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]));
    rank = tmp;
    if (n == 0 || rank[sa[n - 1]] == n - 1) break;
  }
  std::vector<std::size_t> lcp(n, 0);
  for (std::size_t i = 0, h = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    std::size_t j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[rank[i]] = h;
    if (h) --h;
  }
  // Each suffix contributes new substrings of lengths (lcp, n - sa].
  std::vector<std::int64_t> diff(n + 2, 0);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t lo = lcp[r] + 1, hi = n - sa[r];
    if (lo <= hi) {
      diff[lo] += 1;
      diff[hi + 1] -= 1;
    }
  }
  std::vector<std::uint64_t> out;
  std::int64_t cur = 0;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(std::uint64_t(cur += diff[k]));
  return out;
}

Rational delta(std::span<const Id> s) {
  Rational best{0, 1};
  auto table = dk_table(s);
  for (std::size_t k = 1; k <= table.size(); ++k) {
    Rational r{table[k - 1], k};
    if (best < r) best = r;
  }
  return best.reduced();
}

bool reference_equal(const index::Index& a, const index::Index& b) {
  return index::canonical_bytes(a) == index::canonical_bytes(b);
}

}  // namespace jbt::oracle
