#pragma once

#include <span>

#include "jbt/index.hpp"

namespace jbt::oracle {

// Exact fraction with positive parts; compared by cross-multiplication.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  bool operator==(const Rational& o) const { return (unsigned __int128)num * o.den == (unsigned __int128)o.num * den; }
  bool operator<(const Rational& o) const { return (unsigned __int128)num * o.den < (unsigned __int128)o.num * den; }
  Rational reduced() const;
  std::string str() const;
};

std::vector<Pos> naive_search(std::span<const Id> s, std::span<const Id> t);

// Number of distinct length-k substrings.
std::uint64_t dk(std::span<const Id> s, std::size_t k);
// d_k for k = 1..n.
std::vector<std::uint64_t> dk_table(std::span<const Id> s);
// max_k d_k / k.
Rational delta(std::span<const Id> s);

bool reference_equal(const index::Index& a, const index::Index& b);

}  // namespace jbt::oracle
