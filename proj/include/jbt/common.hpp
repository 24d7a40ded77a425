#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace jbt {

using Id = std::uint64_t;
using Pos = std::int64_t;
using NodeRef = std::uint32_t;

constexpr NodeRef kNoNode = ~NodeRef{0};

// Identifier layout.  Letters occupy [0, 2^32).  Generated identifiers carry
// the level that minted them in bits 40.. and a per-level counter below, so
// two constructions that mint the blocks of each level in left-to-right order
// assign identical values regardless of how they interleave levels.
constexpr Id kLetterLimit = Id{1} << 32;
constexpr Id kGeneratedBase = Id{1} << 32;
constexpr int kLevelShift = 40;
constexpr Id kCounterMask = (Id{1} << kLevelShift) - 1;
constexpr Id kOverlayBase = Id{1} << 62;  // query-local ids for pattern blocks
constexpr Id kInf = ~Id{0};               // id' / id'' "infinity"
constexpr Id kDollar = ~Id{0} - 1;        // clipped-history marker in trie keys
constexpr Id kEndMark = ~Id{0} - 2;       // range-end marker in trie keys

inline bool is_letter(Id id) { return id < kLetterLimit; }
inline bool is_overlay(Id id) { return id >= kOverlayBase && id < kEndMark; }

inline Id make_generated(int level, std::uint64_t counter, bool overlay = false) {
  if (counter > kCounterMask) throw std::overflow_error("identifier counter overflow");
  return (overlay ? kOverlayBase : 0) + kGeneratedBase + (Id(level) << kLevelShift) + counter;
}

// Level on which a block with this identifier was first created.
inline int creation_level(Id id) {
  if (is_letter(id)) return 0;
  Id v = id >= kOverlayBase ? id - kOverlayBase : id;
  return int((v - kGeneratedBase) >> kLevelShift);
}

// Blocks on levels 2k and 2k+1 are "short" when their length is at most 2^k.
inline Pos short_limit(int level) {
  int k = level / 2;
  return k >= 62 ? (Pos{1} << 62) : (Pos{1} << k);
}

struct VecHash {
  std::size_t operator()(const std::vector<Id>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ v.size();
    for (Id x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
    }
    return std::size_t(h ^ (h >> 33));
  }
};

struct TripleHash {
  std::size_t operator()(const std::tuple<int, Id, std::uint64_t>& t) const noexcept {
    std::uint64_t h = std::uint64_t(std::get<0>(t)) * 0x9e3779b97f4a7c15ull;
    h ^= std::get<1>(t) + 0xc2b2ae3d27d4eb4full + (h << 6) + (h >> 2);
    h ^= std::get<2>(t) * 0xff51afd7ed558ccdull + (h >> 3);
    return std::size_t(h ^ (h >> 29));
  }
};

// Map that is hashed by default and ordered in deterministic mode.
template <class K, class V, class H = std::hash<K>>
class IdMap {
 public:
  explicit IdMap(bool ordered = false) : ordered_(ordered) {}

  bool ordered() const { return ordered_; }

  const V* find(const K& k) const {
    if (ordered_) {
      auto it = o_.find(k);
      return it == o_.end() ? nullptr : &it->second;
    }
    auto it = h_.find(k);
    return it == h_.end() ? nullptr : &it->second;
  }
  V* find(const K& k) { return const_cast<V*>(std::as_const(*this).find(k)); }

  // Returns (value, inserted).
  std::pair<V*, bool> emplace(const K& k, const V& v) {
    if (ordered_) {
      auto [it, ok] = o_.emplace(k, v);
      return {&it->second, ok};
    }
    auto [it, ok] = h_.emplace(k, v);
    return {&it->second, ok};
  }

  V& operator[](const K& k) { return ordered_ ? o_[k] : h_[k]; }

  std::size_t size() const { return ordered_ ? o_.size() : h_.size(); }

  // Entries in key order, independent of the storage mode.
  std::vector<std::pair<K, V>> sorted() const {
    std::vector<std::pair<K, V>> out;
    if (ordered_) {
      out.assign(o_.begin(), o_.end());
    } else {
      out.assign(h_.begin(), h_.end());
      std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return out;
  }

 private:
  bool ordered_;
  std::unordered_map<K, V, H> h_;
  std::map<K, V> o_;
};

}  // namespace jbt
