#include <set>

#include "doctest.h"
#include "jbt/oracle.hpp"
#include "jbt/search.hpp"
#include "support.hpp"

using namespace jbt;
using testsupport::to_ids;

namespace {

std::vector<Pos> run(const std::string& s, const std::string& t) {
  auto text = to_ids(s);
  auto I = index::build_offline(text);
  return search::search(I, to_ids(t));
}

// Patterns of one text: planted substrings, random strings and mutants.
std::vector<std::vector<Id>> patterns(std::mt19937_64& rng, const std::vector<Id>& s, int count, unsigned sigma) {
  std::vector<std::vector<Id>> out;
  const std::size_t n = s.size();
  for (int k = 0; k < count; ++k) {
    std::size_t m = 1 + rng() % std::min<std::size_t>(n, k % 3 == 0 ? n : 12);
    std::size_t a = rng() % (n - m + 1);
    std::vector<Id> t(s.begin() + a, s.begin() + a + m);
    switch (k % 4) {
      case 1: t = testsupport::random_text(rng, m, sigma); break;
      case 2: t[rng() % m] = 'a' + rng() % (sigma + 1); break;
      default: break;
    }
    out.push_back(std::move(t));
  }
  return out;
}

void check_text(const std::vector<Id>& s, std::mt19937_64& rng, int count, unsigned sigma) {
  auto I = index::build_offline(s);
  for (const auto& t : patterns(rng, s, count, sigma)) {
    auto got = search::search(I, t);
    auto want = oracle::naive_search(s, t);
    if (got != want) {
      std::string st, tt;
      for (Id c : s) st += std::to_string(c) + " ";
      for (Id c : t) tt += std::to_string(c) + " ";
      INFO("text: " << st);
      INFO("pattern: " << tt);
      CHECK(got == want);
      return;
    }
  }
}

}  // namespace

TEST_CASE("search examples") {
  CHECK(run("abracadabra", "abra") == std::vector<Pos>{0, 7});
  CHECK(run("abracadabra", "z").empty());
  CHECK(run("aaaa", "a") == std::vector<Pos>{0, 1, 2, 3});
  CHECK(run("aaaa", "aa") == std::vector<Pos>{0, 1, 2});
  CHECK(run("abab", "ab") == std::vector<Pos>{0, 2});
  CHECK(run("a", "a") == std::vector<Pos>{0});
  CHECK(run("ab", "abc").empty());
  CHECK(run("mississippi", "issi") == std::vector<Pos>{1, 4});
  CHECK_THROWS(run("ab", ""));
}

TEST_CASE("secondary occurrences come from copy, intermediate or run links") {
  std::string s;
  for (int k = 0; k < 8; ++k) s += "abcdefgh";
  auto I = index::build_offline(to_ids(s));
  auto occ = search::find_occurrences(I, to_ids("cdef"));
  REQUIRE(occ.size() == 8);
  CHECK(occ[0].kind == search::Provenance::Primary);
  std::size_t linked = 0;
  for (const auto& o : occ) {
    auto kind = I.J[o.node].kind;
    if (o.kind == search::Provenance::Secondary) {
      CHECK((kind == jiggly::NodeKind::Copy || kind == jiggly::NodeKind::Intermediate));
      ++linked;
    }
    if (o.kind == search::Provenance::Periodic) CHECK(kind == jiggly::NodeKind::Run);
    if (o.kind != search::Provenance::Primary) CHECK(!I.J[o.node].has_children() == (o.kind == search::Provenance::Secondary));
  }
  CHECK(linked + std::count_if(occ.begin(), occ.end(), [](const auto& o) { return o.kind != search::Provenance::Secondary; }) == 8);
}

TEST_CASE("candidate splits") {
  fingerprint::Fingerprint fp;
  fp.elements = {{'a', 3, 1, 0}};
  CHECK(search::candidate_splits(fp, 3) == std::vector<Pos>{2});
  fp.elements = {{'a', 1, 1, 0}, {'b', 1, 1, 1}};
  CHECK(search::candidate_splits(fp, 2) == std::vector<Pos>{1});
}

TEST_CASE("pattern context of the text equals the text hierarchy") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 30; ++it) {
    auto s = testsupport::repetitive_text(rng, 1 + rng() % 300, 1 + rng() % 4);
    auto I = index::build_offline(s);
    auto h = hierarchy::build_hierarchy(s);
    auto ctx = search::build_pattern_context(I, s);
    REQUIRE(ctx.rows.size() == h.rows.size());
    CHECK(ctx.overlayIds == 0);
    for (std::size_t l = 0; l < h.rows.size(); ++l) {
      REQUIRE(ctx.rows[l].blocks.size() == h.rows[l].blocks.size());
      for (std::size_t b = 0; b < h.rows[l].blocks.size(); ++b) CHECK(ctx.rows[l].blocks[b].id == h.rows[l].blocks[b].id);
    }
  }
}

TEST_CASE("absent letters give overlay ids") {
  auto I = index::build_offline(to_ids("abcabc"));
  auto ctx = search::build_pattern_context(I, to_ids("xyzxyz"));
  CHECK(ctx.overlayIds > 0);
  for (const auto& row : ctx.rows)
    for (const auto& b : row.blocks) CHECK((is_letter(b.id) || is_overlay(b.id)));
}

TEST_CASE("search equals naive scan on random and repetitive texts") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 150; ++it) {
    unsigned sigma = std::vector<unsigned>{1, 2, 4, 16}[it % 4];
    std::size_t n = 1 + rng() % 300;
    auto s = it % 2 ? testsupport::random_text(rng, n, sigma) : testsupport::repetitive_text(rng, n, sigma);
    check_text(s, rng, 30, sigma);
  }
}

TEST_CASE("search equals naive scan on texts with intermediate nodes") {
  std::mt19937_64 rng(12);
  for (const auto& s : testsupport::intermediate_texts(3, 20)) {
    check_text(s, rng, 40, 4);
    // Every substring of the repeated chain region.
    auto I = index::build_offline(s);
    for (int k = 0; k < 40; ++k) {
      std::size_t a = rng() % s.size(), m = 1 + rng() % std::min<std::size_t>(s.size() - a, 24);
      std::vector<Id> t(s.begin() + a, s.begin() + a + m);
      CHECK(search::search(I, t) == oracle::naive_search(s, t));
    }
  }
}

TEST_CASE("primary occurrences match the lowest-covering-node classification") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 40; ++it) {
    auto s = testsupport::repetitive_text(rng, 2 + rng() % 200, 2 + rng() % 3);
    auto I = index::build_offline(s);
    const auto& J = I.J;
    for (int k = 0; k < 10; ++k) {
      std::size_t m = 2 + rng() % std::min<std::size_t>(s.size() - 1, 10);
      std::size_t a = rng() % (s.size() - m + 1);
      std::vector<Id> t(s.begin() + a, s.begin() + a + m);
      auto ctx = search::build_pattern_context(I, t);
      std::set<Pos> prim;
      for (const auto& o : search::primary_occurrences(I, ctx)) prim.insert(o.p);
      for (Pos p : oracle::naive_search(s, t)) {
        // Lowest node of J covering [p, p+m).
        NodeRef v = J.root;
        for (bool moved = true; moved;) {
          moved = false;
          for (NodeRef c : J[v].children)
            if (J[c].sbeg <= p && p + Pos(m) - 1 <= J[c].send) {
              v = c;
              moved = true;
              break;
            }
        }
        if (J[v].has_children()) CHECK(prim.count(p) == 1);
      }
    }
  }
}
