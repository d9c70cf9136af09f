#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nocsynth/graph.hpp"

namespace nocsynth {

/// Unordered vertex pair (stored with first < second).
using VertexPair = std::pair<int, int>;

inline VertexPair make_link(int a, int b) { return a < b ? VertexPair{a, b} : VertexPair{b, a}; }

enum class PrimitiveKind { Gossip, Broadcast, Loop, Path, Generic };

/// A communication primitive: the directed pattern searched for in the ACG
/// (representation), the physical links built for it (implementation), the
/// round schedule that realizes the pattern, and the internal routes that the
/// routing tables are derived from.
struct CommPrimitive {
  int id = 0;
  std::string name;
  int k = 0;                                     // vertices are 1..k
  std::vector<NodePair> representation;          // directed edges
  std::vector<VertexPair> implementation;        // undirected links
  std::vector<std::vector<VertexPair>> schedule; // rounds of exchanging pairs
  std::map<NodePair, std::vector<int>> routes;   // (src,dst) -> vertex path

  bool has_rep_edge(int s, int d) const;
  bool has_link(int a, int b) const;
};

struct Library {
  std::vector<CommPrimitive> primitives;

  const CommPrimitive* find(int id) const;
  const CommPrimitive* find(const std::string& name) const;
};

/// The built-in library, ids 1..8:
///   1 MGG4 (4-node gossip), 2 G123 (broadcast to 3), 3 G124 (broadcast to 4),
///   4 L3, 5 L4, 6 L5 (directed loops), 7 P3, 8 P4 (directed paths).
Library builtin_library();

/// Structural classification inferred from the representation graph.
PrimitiveKind classify(const CommPrimitive& p);

/// Returns human-readable violations; empty means the primitive is valid.
/// Checks route well-formedness, the one-transaction-per-vertex-per-round
/// rule, schedule completeness (gossip/broadcast replay), and the
/// ceil(log2 k) round bound for gossip/broadcast primitives.
std::vector<std::string> validate_primitive(const CommPrimitive& p);

/// Stored route for a representation edge. Throws GraphError if (src,dst) is
/// not a representation edge.
const std::vector<int>& route_lookup(const CommPrimitive& p, int src, int dst);

/// Library file format: `prim <id> <name> <k>` starts an entry, followed by
/// `rep <s> <d>`, `impl <a> <b>`, `round <i> <a> <b>`, `route <s> <d> <v1> ... <vn>`.
Library parse_library(const std::string& text);
std::string serialize_library(const Library& lib);

int schedule_rounds_lower_bound(int k);  // ceil(log2 k)

}  // namespace nocsynth
