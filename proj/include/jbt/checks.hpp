#pragma once

#include <random>

#include "jbt/index.hpp"

namespace jbt::checks {

// Rows tile [0, n), children cover their parent exactly and level 0 spells
// the text.  Returns the number of violations.
std::uint64_t tiling_violations(const hierarchy::Hierarchy& h, std::span<const Id> text);

// Block starts on levels 2k and 2k+1 inside random windows [i, j), against
// the bound 64 * ceil((j - i) / 2^k).
struct BoundaryReport {
  std::uint64_t windows = 0;
  std::uint64_t violations = 0;
  double maxRatio = 0;  // largest count / ceil((j - i) / 2^k)
};
BoundaryReport boundary_counts(const hierarchy::Hierarchy& h, std::mt19937_64& rng, int windows);

// Random substring pairs (half of them biased towards equal first letters)
// whose string equality disagrees with fingerprint equality.
std::uint64_t fingerprint_disagreements(const index::Index& I, std::span<const Id> text, std::mt19937_64& rng,
                                        int samples);

}  // namespace jbt::checks
