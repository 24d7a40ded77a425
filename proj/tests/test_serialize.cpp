#include "doctest.h"
#include "jbt/builder.hpp"
#include "jbt/oracle.hpp"
#include "jbt/search.hpp"
#include "jbt/serialize.hpp"
#include "support.hpp"

using namespace jbt;

TEST_CASE("index file round trip") {
  std::mt19937_64 rng(31);
  auto texts = testsupport::intermediate_texts(8, 3);
  for (int it = 0; it < 30; ++it) texts.push_back(testsupport::repetitive_text(rng, 1 + rng() % 400, 1 + rng() % 5));
  for (const auto& s : texts) {
    auto I = builder::build_streaming(s, true);
    std::string bytes = serialize::save(I);
    auto L = serialize::load(bytes);
    CHECK(serialize::save(L) == bytes);
    CHECK(index::canonical_bytes(L) == index::canonical_bytes(I));
    for (int k = 0; k < 10; ++k) {
      std::size_t m = 1 + rng() % std::min<std::size_t>(s.size(), 12);
      std::size_t a = rng() % (s.size() - m + 1);
      std::vector<Id> t(s.begin() + a, s.begin() + a + m);
      CHECK(search::search(L, t) == oracle::naive_search(s, t));
    }
  }
}

TEST_CASE("deterministic builds are bit-identical") {
  std::mt19937_64 rng(32);
  for (int it = 0; it < 10; ++it) {
    auto s = testsupport::repetitive_text(rng, 1 + rng() % 500, 3);
    CHECK(serialize::save(builder::build_streaming(s, true)) == serialize::save(builder::build_streaming(s, true)));
  }
}

TEST_CASE("damaged index files are rejected") {
  auto s = testsupport::to_ids("abracadabra abracadabra");
  std::string bytes = serialize::save(builder::build_streaming(s));
  CHECK_NOTHROW(serialize::load(bytes));
  CHECK_THROWS_AS(serialize::load(""), std::runtime_error);
  CHECK_THROWS_AS(serialize::load(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(serialize::load(magic), std::runtime_error);
  for (std::size_t k = 4; k < bytes.size(); k += 7) {
    std::string bad = bytes;
    bad[k] ^= 0x20;
    CHECK_THROWS_AS(serialize::load(bad), std::runtime_error);
  }
}

TEST_CASE("checksum is CRC-32") {
  CHECK(serialize::checksum("") == 0u);
  CHECK(serialize::checksum("123456789") == 0xcbf43926u);
}
