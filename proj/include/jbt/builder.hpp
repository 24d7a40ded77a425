#pragma once

#include <memory>

#include "jbt/index.hpp"

namespace jbt::builder {

struct BuildStats {
  std::uint64_t letters = 0;
  std::vector<std::uint64_t> blocksPerLevel;
  std::vector<std::uint64_t> peakQueue;  // largest pending window per level
  std::uint64_t jNodes = 0;
  std::uint64_t ctxTrieNodes = 0;  // T-circle plus reversed T-circle
  std::uint64_t points = 0;        // size of P
  std::uint64_t orderRelabels = 0;
  std::uint64_t groupHits = 0;     // closed ranges found in T_id
  std::uint64_t groupMisses = 0;
};

// One subrange decision of the online parser.
struct ParseRecord {
  int level = 0;
  std::uint64_t m = 0;
  std::uint64_t r = 1;
  std::uint64_t mpp = 0;
};

// One-pass constructor.  Letters are fed left to right; finish() flushes the
// level queues and finalizes the index.
class StreamBuilder {
 public:
  explicit StreamBuilder(bool deterministic = false, bool recordParses = false);
  ~StreamBuilder();
  StreamBuilder(const StreamBuilder&) = delete;
  StreamBuilder& operator=(const StreamBuilder&) = delete;

  void feed_letter(Id c);
  index::Index finish();

  const BuildStats& stats() const;
  const std::vector<ParseRecord>& parses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

index::Index build_streaming(std::span<const Id> text, bool deterministic = false, BuildStats* stats = nullptr);

}  // namespace jbt::builder
