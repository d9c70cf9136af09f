#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nocsynth/decompose.hpp"
#include "nocsynth/graph.hpp"

namespace nocsynth {

/// Who contributed a physical link: the index of a match in the
/// decomposition, or the remainder.
struct LinkOrigin {
  int match_index = -1;  // -1 means remainder
  bool is_remainder() const { return match_index < 0; }
};

struct ArchLink {
  int a = 0, b = 0;  // a < b
  double capacity = 0.0;   // bits/s
  double length_mm = 0.0;
  std::vector<LinkOrigin> origins;
};

struct Architecture {
  std::vector<AcgNode> nodes;  // sorted by id
  std::vector<ArchLink> links; // sorted by (a, b)

  bool has_link(int x, int y) const;
  const ArchLink& link(int x, int y) const;
  std::vector<int> neighbors(int id) const;  // ascending
};

/// Per node: destination -> next hop. Defined for every destination the node
/// forwards traffic toward.
struct RoutingTables {
  std::map<int, std::map<int, int>> next_hop;

  bool has(int node, int dst) const;
  int lookup(int node, int dst) const;  // throws GraphError when undefined
  /// Follows next hops from src; returns the node path. Throws GraphError on
  /// a missing entry or a loop.
  std::vector<int> walk(int src, int dst) const;
};

struct GlueOptions {
  double default_capacity = 0.0;  // links get max(default, aggregated demand)
  DistanceMetric metric = DistanceMetric::Manhattan;
};

/// Instantiates every match's implementation links on its mapped host nodes
/// and a direct link per remainder edge; identical links merge, lengths come
/// from node positions.
Architecture glue(const Decomposition& d, const Acg& g, const Library& lib,
                  const EnergyModel& em, const GlueOptions& opts = {});

/// Routing tables from the primitives' internal routes: covered edges follow
/// route_lookup mapped onto host ids, remainder edges go direct. When a
/// source entry and a pass-through entry collide, the shorter route wins.
RoutingTables build_routing_tables(const Architecture& a, const Decomposition& d, const Acg& g,
                                   const Library& lib);

/// A directed channel (one direction of a physical link).
using Channel = std::pair<int, int>;

struct DeadlockReport {
  std::vector<std::vector<Channel>> cycles;  // elementary cycles in the CDG
  int min_virtual_channels = 1;              // layers needed to break them
  std::map<NodePair, int> vc_assignment;     // routed pair -> VC layer (0-based)
  bool deadlock_free() const { return cycles.empty(); }
};

/// Builds the channel dependency graph implied by walking every table entry
/// and enumerates its elementary cycles. An empty cycle list means the
/// routing is deadlock-free under wormhole/cut-through switching.
DeadlockReport detect_deadlock(const Architecture& a, const RoutingTables& t);

/// Bisection bandwidth of the architecture: minimum total link capacity over
/// balanced node bipartitions. Exhaustive for <= 20 nodes, heuristic above.
BisectionResult bisection_bandwidth(const Architecture& a);

/// Architecture file: arch <n> / node <id> <x> <y> / link <a> <b> <cap> <len>
/// / route <node> <dst> <next_hop>.
std::string serialize_architecture(const Architecture& a, const RoutingTables& t);
std::pair<Architecture, RoutingTables> parse_architecture(const std::string& text);

}  // namespace nocsynth
