#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <set>

#include "doctest.h"
#include "nocsynth/isomorphism.hpp"
#include "nocsynth/workloads.hpp"
#include "oracles.hpp"

using namespace nocsynth;

namespace {

Acg mgg4_pattern_host() {
  // Exactly MGG4's representation placed on nodes {1,2,5,6}.
  std::vector<AcgNode> nodes = {{1, {}}, {2, {}}, {5, {}}, {6, {}}};
  int ids[4] = {1, 2, 5, 6};
  std::vector<AcgEdge> edges;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) edges.push_back({ids[i], ids[j], 1, 1});
  return Acg(nodes, edges);
}

}  // namespace

TEST_CASE("MGG4 on its own representation: one match after dedup") {
  Acg host = mgg4_pattern_host();
  Library lib_ = builtin_library();
  const CommPrimitive* mgg4 = lib_.find("MGG4");
  MatchList ml = enumerate_matches(host, *mgg4);
  CHECK_FALSE(ml.truncated);
  REQUIRE(ml.matches.size() == 1);
  // The retained mapping is the lexicographically smallest automorphism image.
  CHECK(ml.matches[0].mapping == std::vector<int>{1, 2, 5, 6});
  CHECK(verify_match(host, *mgg4, ml.matches[0]));
}

TEST_CASE("empty host yields no matches") {
  for (const CommPrimitive& p : builtin_library().primitives)
    CHECK(enumerate_matches(Acg{}, p).matches.empty());
}

TEST_CASE("L4 matches in the AES graph: rows 2 and 4, never row 3") {
  Acg aes = aes_acg();
  Library lib4_ = builtin_library();
  const CommPrimitive* l4 = lib4_.find("L4");
  MatchList ml = enumerate_matches(aes, *l4);

  std::set<std::set<int>> images;
  for (const Match& m : ml.matches) images.insert({m.mapping.begin(), m.mapping.end()});
  CHECK(images.count({5, 6, 7, 8}) == 1);
  CHECK(images.count({13, 14, 15, 16}) == 1);
  for (const auto& img : images) {
    bool inside_row3 = true;
    for (int v : img)
      if (v < 9 || v > 12) inside_row3 = false;
    CHECK_FALSE(inside_row3);
  }

  // Against the brute-force oracle over all injective 4-subsets.
  auto brute = oracle::brute_force_matches(aes, *l4);
  CHECK(ml.matches == brute);
}

TEST_CASE("completeness vs brute force on small random hosts") {
  Library lib = builtin_library();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 4 + int(rng() % 5);  // 4..8 nodes
    int edges = int(rng() % (n * (n - 1) / 2 + 1)) + n / 2;
    edges = std::min(edges, n * (n - 1));
    Acg host = random_acg(rng(), n, edges);
    for (const CommPrimitive& p : lib.primitives) {
      MatchList ml = enumerate_matches(host, p);
      REQUIRE_FALSE(ml.truncated);
      auto brute = oracle::brute_force_matches(host, p);
      CHECK(ml.matches == brute);
      for (const Match& m : ml.matches) CHECK(verify_match(host, p, m));
    }
  }
}

TEST_CASE("verify_match rejects broken matches") {
  Acg host = mgg4_pattern_host();
  Library lib_ = builtin_library();
  const CommPrimitive* mgg4 = lib_.find("MGG4");
  Match good = enumerate_matches(host, *mgg4).matches[0];

  Match dup = good;
  dup.mapping[1] = dup.mapping[0];  // not injective
  CHECK_FALSE(verify_match(host, *mgg4, dup));

  // Delete one ordered pair from the clique: the match no longer verifies.
  Acg damaged = remove_edges(host, EdgeSet({{1, 6}}));
  CHECK_FALSE(verify_match(damaged, *mgg4, good));

  Match wrong_cover = good;
  wrong_cover.covered = EdgeSet({{1, 2}});
  CHECK_FALSE(verify_match(host, *mgg4, wrong_cover));
}

TEST_CASE("deterministic output order") {
  Acg aes = aes_acg();
  Library lib = builtin_library();
  for (const CommPrimitive& p : lib.primitives) {
    MatchList a = enumerate_matches(aes, p);
    MatchList b = enumerate_matches(aes, p);
    CHECK(a.matches == b.matches);
    CHECK(std::is_sorted(a.matches.begin(), a.matches.end()));
  }
}

TEST_CASE("timeout truncates instead of failing") {
  // A dense host with a generous pattern; a zero timeout must flag truncation.
  Acg host = random_acg(5, 9, 64);
  Library lib_ = builtin_library();
  const CommPrimitive* mgg4 = lib_.find("MGG4");
  MatchList ml = enumerate_matches(host, *mgg4, std::chrono::milliseconds(0));
  CHECK(ml.truncated);
}
