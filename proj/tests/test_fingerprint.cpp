#include "doctest.h"
#include "jbt/fingerprint.hpp"
#include "support.hpp"

using namespace jbt;
using namespace jbt::fingerprint;
using hierarchy::build_hierarchy;

namespace {

std::vector<Id> expand(const jiggly::JigglyTree& J, const Fingerprint& fp) {
  std::vector<Id> out;
  for (const auto& e : fp.elements)
    for (std::uint64_t c = 0; c < e.count; ++c) {
      if (is_letter(e.id)) out.push_back(e.id);
      else {
        auto s = jiggly::expand_string(J, J.rep(e.id));
        out.insert(out.end(), s.begin(), s.end());
      }
    }
  return out;
}

}  // namespace

TEST_CASE("fin small cases") {
  auto t = testsupport::to_ids("aaa");
  auto h = build_hierarchy(t);
  CHECK(fingerprint_rows(h.rows, 0, 0).elements.empty());
  auto fp = fingerprint_rows(h.rows, 0, 3);
  REQUIRE(fp.elements.size() == 1);
  CHECK(fp.elements[0].id == Id('a'));
  CHECK(fp.elements[0].count == 3);
  auto one = fingerprint_rows(h.rows, 1, 2);
  REQUIRE(one.elements.size() == 1);
  CHECK(one.elements[0].count == 1);
}

TEST_CASE("fin over rows equals the literal definition") {
  auto texts = testsupport::corpus(51, 60, 160);
  for (auto& t : testsupport::intermediate_texts(52, 5)) texts.push_back(t);
  for (const auto& t : texts) {
    auto h = build_hierarchy(t);
    Pos n = Pos(t.size());
    for (Pos x = 0; x < n; x += 1 + n / 40)
      for (Pos y = x + 1; y <= n; ++y) {
        auto a = fingerprint_rows(h.rows, x, y), b = fin_reference(h.rows, x, y);
        REQUIRE(a.elements.size() == b.elements.size());
        for (std::size_t k = 0; k < a.elements.size(); ++k) {
          CHECK(a.elements[k].id == b.elements[k].id);
          CHECK(a.elements[k].count == b.elements[k].count);
          CHECK(a.elements[k].offset == b.elements[k].offset);
          CHECK(a.elements[k].baseLen == b.elements[k].baseLen);
        }
      }
  }
}

TEST_CASE("fin over the jiggly tree equals fin over rows and tiles the substring") {
  auto texts = testsupport::corpus(53, 60, 500);
  for (auto& t : testsupport::intermediate_texts(54, 10)) texts.push_back(t);
  std::mt19937_64 rng(55);
  for (const auto& t : texts) {
    auto h = build_hierarchy(t);
    auto J = jiggly::build_jiggly(h);
    TreeSource src(J);
    Pos n = Pos(t.size());
    for (int q = 0; q < 200; ++q) {
      Pos x = Pos(rng() % t.size()), y = x + 1 + Pos(rng() % (n - x));
      auto a = fingerprint_tree(src, x, y), b = fingerprint_rows(h.rows, x, y);
      CHECK(a == b);
      std::vector<Id> sub(t.begin() + x, t.begin() + y);
      CHECK(expand(J, a) == sub);
      Pos off = 0;
      for (const auto& e : a.elements) {
        CHECK(e.offset == off);
        off += Pos(e.count) * e.baseLen;
      }
      CHECK(off == y - x);
    }
  }
}

TEST_CASE("equal substrings have equal fingerprints and vice versa") {
  std::mt19937_64 rng(56);
  for (int round = 0; round < 20; ++round) {
    auto t = round % 2 ? testsupport::random_text(rng, 1 + rng() % 64, 1 + rng() % 3)
                       : testsupport::repetitive_text(rng, 1 + rng() % 64, 1 + rng() % 3);
    auto h = build_hierarchy(t);
    Pos n = Pos(t.size());
    std::map<std::vector<Id>, tries::FpKey> seen;
    std::map<tries::FpKey, std::vector<Id>> back;
    for (Pos x = 0; x < n; ++x)
      for (Pos y = x + 1; y <= n; ++y) {
        std::vector<Id> sub(t.begin() + x, t.begin() + y);
        auto key = fingerprint_rows(h.rows, x, y).key();
        auto [it, ok] = seen.emplace(sub, key);
        if (!ok) CHECK(it->second == key);
        auto [jt, ok2] = back.emplace(key, sub);
        if (!ok2) CHECK(jt->second == sub);
      }
  }
}
