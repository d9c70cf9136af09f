#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "nocsynth/primitives.hpp"

using namespace nocsynth;

TEST_CASE("builtin library shape") {
  Library lib = builtin_library();
  REQUIRE(lib.primitives.size() == 8);
  const char* names[] = {"MGG4", "G123", "G124", "L3", "L4", "L5", "P3", "P4"};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(lib.primitives[i].id == static_cast<int>(i) + 1);
    CHECK(lib.primitives[i].name == names[i]);
  }

  const CommPrimitive* mgg4 = lib.find("MGG4");
  REQUIRE(mgg4 != nullptr);
  CHECK(mgg4->id == 1);
  CHECK(mgg4->representation.size() == 12);
  CHECK(mgg4->implementation.size() == 4);
  CHECK(mgg4->schedule.size() == 2);

  const CommPrimitive* l4 = lib.find("L4");
  REQUIRE(l4 != nullptr);
  std::set<NodePair> rep(l4->representation.begin(), l4->representation.end());
  CHECK(rep == std::set<NodePair>{{1, 2}, {2, 3}, {3, 4}, {4, 1}});

  const CommPrimitive* g124 = lib.find("G124");
  REQUIRE(g124 != nullptr);
  CHECK(g124->k == 5);
  CHECK(g124->representation.size() == 4);
}

TEST_CASE("every builtin primitive validates clean") {
  for (const CommPrimitive& p : builtin_library().primitives) {
    auto violations = validate_primitive(p);
    for (const auto& v : violations) MESSAGE(v);
    CHECK(violations.empty());
  }
}

TEST_CASE("classification") {
  Library lib = builtin_library();
  CHECK(classify(*lib.find("MGG4")) == PrimitiveKind::Gossip);
  CHECK(classify(*lib.find("G123")) == PrimitiveKind::Broadcast);
  CHECK(classify(*lib.find("G124")) == PrimitiveKind::Broadcast);
  CHECK(classify(*lib.find("L3")) == PrimitiveKind::Loop);
  CHECK(classify(*lib.find("L5")) == PrimitiveKind::Loop);
  CHECK(classify(*lib.find("P4")) == PrimitiveKind::Path);
}

TEST_CASE("MGG4 gossip completes in exactly two rounds") {
  Library lib_ = builtin_library();
  const CommPrimitive* mgg4 = lib_.find("MGG4");
  std::vector<std::set<int>> know(5);
  for (int v = 1; v <= 4; ++v) know[v] = {v};
  int rounds = 0;
  for (const auto& round : mgg4->schedule) {
    std::set<int> busy;
    for (auto [a, b] : round) {
      CHECK(busy.insert(a).second);
      CHECK(busy.insert(b).second);
      auto merged = know[a];
      merged.insert(know[b].begin(), know[b].end());
      know[a] = know[b] = merged;
    }
    ++rounds;
  }
  CHECK(rounds == 2);
  for (int v = 1; v <= 4; ++v) CHECK(know[v].size() == 4);
}

TEST_CASE("a vertex in two transactions per round is flagged") {
  CommPrimitive bad = *builtin_library().find("MGG4");
  bad.schedule[0] = {make_link(1, 2), make_link(1, 3)};
  auto violations = validate_primitive(bad);
  bool found = false;
  for (const auto& v : violations)
    if (v.find("two transactions") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("alternative adjacency-valid route passes validation") {
  CommPrimitive l4 = *builtin_library().find("L4");
  l4.routes[{1, 3}] = {1, 4, 3};  // extra route; simple, adjacent, within diameter
  CHECK(validate_primitive(l4).empty());

  // A route through a non-link must be rejected.
  CommPrimitive broken = *builtin_library().find("L4");
  broken.routes[{1, 3}] = {1, 3};  // 1-3 is not an implementation link
  CHECK_FALSE(validate_primitive(broken).empty());
}

TEST_CASE("route_lookup") {
  Library lib = builtin_library();
  const CommPrimitive* mgg4 = lib.find("MGG4");
  CHECK(route_lookup(*mgg4, 1, 4) == std::vector<int>{1, 3, 4});
  CHECK(route_lookup(*mgg4, 1, 2) == std::vector<int>{1, 2});
  const CommPrimitive* l4 = lib.find("L4");
  CHECK(route_lookup(*l4, 4, 1) == std::vector<int>{4, 1});
  CHECK_THROWS_AS(route_lookup(*l4, 1, 3), GraphError);
}

TEST_CASE("routes are simple and within the implementation diameter") {
  for (const CommPrimitive& p : builtin_library().primitives) {
    std::vector<AcgNode> nodes;
    std::vector<AcgEdge> edges;
    for (int v = 1; v <= p.k; ++v) nodes.push_back({v, std::nullopt});
    for (auto [a, b] : p.implementation) edges.push_back({a, b, 0, 0});
    auto diam = diameter(Acg(nodes, edges), true);
    REQUIRE(diam.has_value());
    for (const auto& [edge, path] : p.routes) {
      std::set<int> seen(path.begin(), path.end());
      CHECK(seen.size() == path.size());
      CHECK(static_cast<int>(path.size()) - 1 <= *diam);
      CHECK(path.front() == edge.first);
      CHECK(path.back() == edge.second);
    }
  }
}

TEST_CASE("library file round-trip") {
  Library lib = builtin_library();
  std::string text = serialize_library(lib);
  Library back = parse_library(text);
  REQUIRE(back.primitives.size() == lib.primitives.size());
  for (std::size_t i = 0; i < lib.primitives.size(); ++i) {
    const CommPrimitive& a = lib.primitives[i];
    const CommPrimitive& b = back.primitives[i];
    CHECK(a.id == b.id);
    CHECK(a.name == b.name);
    CHECK(a.k == b.k);
    CHECK(a.representation == b.representation);
    CHECK(a.implementation == b.implementation);
    CHECK(a.schedule == b.schedule);
    CHECK(a.routes == b.routes);
    CHECK(validate_primitive(b).empty());
  }
}

TEST_CASE("library parser rejects gapped ids") {
  CHECK_THROWS_AS(parse_library("prim 2 X 3\nrep 1 2\n"), ParseError);
}
