#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "nocsynth/decompose.hpp"
#include "nocsynth/simulator.hpp"
#include "nocsynth/synthesis.hpp"
#include "nocsynth/workloads.hpp"
#include "oracles.hpp"

using namespace nocsynth;

namespace {

struct AesSynth {
  Acg aes = aes_acg();
  Library lib = builtin_library();
  EnergyModel em = EnergyModel::unit();
  Decomposition d;
  Architecture arch;
  RoutingTables tables;

  AesSynth() {
    auto res = decompose(aes, lib, em, Constraints::unlimited());
    REQUIRE(res.best.has_value());
    d = *res.best;
    arch = glue(d, aes, lib, em);
    tables = build_routing_tables(arch, d, aes, lib);
  }
};

Acg host_on(std::vector<int> ids, std::vector<AcgEdge> edges) {
  std::vector<AcgNode> nodes;
  for (int id : ids) nodes.push_back({id, std::nullopt});
  return Acg(std::move(nodes), std::move(edges));
}

}  // namespace

TEST_CASE("glue: single MGG4 on {1,2,5,6} builds the mapped 4-cycle") {
  std::vector<AcgEdge> edges;
  int ids[4] = {1, 2, 5, 6};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) edges.push_back({ids[i], ids[j], 1, 1});
  Acg host = host_on({1, 2, 5, 6}, edges);
  Library lib = builtin_library();
  auto res = decompose(host, lib, EnergyModel::unit(), Constraints::unlimited());
  REQUIRE(res.best.has_value());
  Architecture a = glue(*res.best, host, lib, EnergyModel::unit());

  std::set<VertexPair> links;
  for (const ArchLink& l : a.links) links.insert({l.a, l.b});
  CHECK(links == std::set<VertexPair>{{1, 2}, {2, 6}, {5, 6}, {1, 5}});
}

TEST_CASE("glue: empty decomposition of the empty graph") {
  Architecture a = glue(Decomposition{}, Acg{}, builtin_library(), EnergyModel::unit());
  CHECK(a.links.empty());
  CHECK(a.nodes.empty());
}

TEST_CASE("glue: AES architecture link census") {
  AesSynth s;
  // 4 column 4-cycles + 2 row 4-cycles + the row-3 direct links. The four
  // remainder edges are two 2-cycles, which merge onto two physical links,
  // so 16 + 8 + 2 = 26.
  CHECK(s.arch.links.size() == 26);
  CHECK(s.arch.has_link(9, 11));
  CHECK(s.arch.has_link(10, 12));

  // Column 1 cycle from the fixed implementation under mapping (1,5,9,13).
  CHECK(s.arch.has_link(1, 5));
  CHECK(s.arch.has_link(5, 13));
  CHECK(s.arch.has_link(13, 9));
  CHECK(s.arch.has_link(9, 1));

  // Merged remainder links carry both directions' origins.
  CHECK(s.arch.link(9, 11).origins.size() == 2);
  for (const LinkOrigin& o : s.arch.link(9, 11).origins) CHECK(o.is_remainder());

  // Link lengths come from grid positions (unit spacing, manhattan).
  CHECK(s.arch.link(1, 5).length_mm == 1.0);
  CHECK(s.arch.link(9, 11).length_mm == 2.0);
}

TEST_CASE("glue is idempotent") {
  AesSynth s;
  Architecture again = glue(s.d, s.aes, s.lib, s.em);
  REQUIRE(again.links.size() == s.arch.links.size());
  for (std::size_t i = 0; i < again.links.size(); ++i) {
    CHECK(again.links[i].a == s.arch.links[i].a);
    CHECK(again.links[i].b == s.arch.links[i].b);
    CHECK(again.links[i].capacity == s.arch.links[i].capacity);
    CHECK(again.links[i].length_mm == s.arch.links[i].length_mm);
  }
}

TEST_CASE("routing tables: MGG4 pass-through entry") {
  std::vector<AcgEdge> edges;
  int ids[4] = {1, 2, 5, 6};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) edges.push_back({ids[i], ids[j], 1, 1});
  Acg host = host_on({1, 2, 5, 6}, edges);
  Library lib = builtin_library();
  auto res = decompose(host, lib, EnergyModel::unit(), Constraints::unlimited());
  Architecture a = glue(*res.best, host, lib, EnergyModel::unit());
  RoutingTables t = build_routing_tables(a, *res.best, host, lib);

  // Pattern route 1->4 via 3 maps to host (3 -> 5, 4 -> 6): node 1's entry
  // for destination 6 forwards to 5 first.
  CHECK(t.lookup(1, 6) == 5);
  CHECK(t.walk(1, 6) == std::vector<int>{1, 5, 6});
}

TEST_CASE("routing tables: remainder goes direct, AES delivery within bounds") {
  AesSynth s;
  CHECK(s.tables.lookup(9, 11) == 11);

  // Delivery for every ACG pair: primitive-routed pairs within the library
  // diameter (2 for MGG4/L4), remainder pairs in exactly one hop.
  for (const AcgEdge& e : s.aes.edges()) {
    std::vector<int> path = s.tables.walk(e.src, e.dst);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      CHECK(s.arch.has_link(path[i], path[i + 1]));
    if (s.d.remainder.contains({e.src, e.dst}))
      CHECK(path.size() == 2);
    else
      CHECK(path.size() <= 3);  // <= 2 hops
  }
}

TEST_CASE("conflicting source/pass-through entries resolve to the shorter route") {
  // Two path primitives meeting at node 2 with destination 4:
  //   P3 match (2,3,4) covers 2->3, 3->4 and emits (2,4)? no - P3 covers only
  //   its representation edges. Build the collision directly instead:
  // match A covers (2,4) with route [2,1,4]; match B covers (3,4) with route
  // [3,2,4], making node 2 also a pass-through toward 4 with next hop 4.
  Library lib;
  CommPrimitive pa;
  pa.id = 1;
  pa.name = "VIA";
  pa.k = 3;
  pa.representation = {{1, 3}};
  pa.implementation = {make_link(1, 2), make_link(2, 3)};
  pa.routes[{1, 3}] = {1, 2, 3};
  pa.schedule = {{make_link(1, 2)}, {make_link(2, 3)}};
  lib.primitives.push_back(pa);

  Acg g = host_on({1, 2, 3, 4},
                  {{2, 4, 1, 1}, {3, 4, 1, 1}});
  Match a;  // covers (2,4) routed 2 -> 1 -> 4
  a.primitive_id = 1;
  a.mapping = {2, 1, 4};
  a.covered = EdgeSet({{2, 4}});
  Match b;  // covers (3,4) routed 3 -> 2 -> 4
  b.primitive_id = 1;
  b.mapping = {3, 2, 4};
  b.covered = EdgeSet({{3, 4}});

  Decomposition d;
  d.matches = {a, b};
  d.cost = 0;

  Architecture arch = glue(d, g, lib, EnergyModel::unit());
  RoutingTables t = build_routing_tables(arch, d, g, lib);
  // Node 2's entry for 4: source route says via 1 (2 hops), pass-through says
  // direct (1 hop). Shorter wins; both flows still deliver.
  CHECK(t.lookup(2, 4) == 4);
  CHECK(t.walk(2, 4) == std::vector<int>{2, 4});
  CHECK(t.walk(3, 4) == std::vector<int>{3, 2, 4});
}

TEST_CASE("detect_deadlock: star routing has no cycles") {
  // Hub node 1, leaves 2..5, all traffic through the hub.
  Architecture a;
  for (int i = 1; i <= 5; ++i) a.nodes.push_back({i, std::nullopt});
  for (int leaf = 2; leaf <= 5; ++leaf) a.links.push_back({1, leaf, 1.0, 1.0, {}});
  RoutingTables t;
  for (int s = 2; s <= 5; ++s)
    for (int d = 2; d <= 5; ++d) {
      if (s == d) continue;
      t.next_hop[s][d] = 1;
      t.next_hop[1][d] = d;
    }
  DeadlockReport rep = detect_deadlock(a, t);
  CHECK(rep.cycles.empty());
  CHECK(rep.min_virtual_channels == 1);
}

TEST_CASE("detect_deadlock: unidirectional ring with 2-hop destinations") {
  Architecture a;
  for (int i = 1; i <= 4; ++i) a.nodes.push_back({i, std::nullopt});
  a.links.push_back({1, 2, 1, 1, {}});
  a.links.push_back({2, 3, 1, 1, {}});
  a.links.push_back({3, 4, 1, 1, {}});
  a.links.push_back({1, 4, 1, 1, {}});
  RoutingTables t;
  auto succ = [](int v) { return v % 4 + 1; };
  for (int s = 1; s <= 4; ++s) {
    int d = succ(succ(s));
    t.next_hop[s][d] = succ(s);
    t.next_hop[succ(s)][d] = d;
  }
  DeadlockReport rep = detect_deadlock(a, t);
  REQUIRE(rep.cycles.size() == 1);
  CHECK(rep.cycles[0].size() == 4);
  CHECK(rep.min_virtual_channels >= 2);

  // Independent cycle oracle on the same dependency graph.
  std::map<Channel, int> cid;
  std::vector<std::pair<int, int>> deps;
  auto id_of = [&](Channel c) {
    auto [it, fresh] = cid.emplace(c, int(cid.size()));
    return it->second;
  };
  for (int s = 1; s <= 4; ++s) {
    int m = succ(s), d = succ(succ(s));
    deps.push_back({id_of({s, m}), id_of({m, d})});
  }
  auto cycles = oracle::brute_force_cycles(int(cid.size()), deps);
  CHECK(cycles.size() == rep.cycles.size());
}

TEST_CASE("AES synthesized routing is deadlock-free") {
  AesSynth s;
  DeadlockReport rep = detect_deadlock(s.arch, s.tables);
  CHECK(rep.cycles.empty());
  CHECK(rep.min_virtual_channels == 1);
}

TEST_CASE("architecture file round-trip") {
  AesSynth s;
  std::string text = serialize_architecture(s.arch, s.tables);
  auto [a2, t2] = parse_architecture(text);
  CHECK(a2.nodes.size() == s.arch.nodes.size());
  REQUIRE(a2.links.size() == s.arch.links.size());
  for (std::size_t i = 0; i < a2.links.size(); ++i) {
    CHECK(a2.links[i].a == s.arch.links[i].a);
    CHECK(a2.links[i].b == s.arch.links[i].b);
    CHECK(a2.links[i].capacity == s.arch.links[i].capacity);
    CHECK(a2.links[i].length_mm == s.arch.links[i].length_mm);
  }
  CHECK(t2.next_hop == s.tables.next_hop);
  CHECK(serialize_architecture(a2, t2) == text);
}
