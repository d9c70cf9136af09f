#pragma once

#include <chrono>
#include <vector>

#include "nocsynth/graph.hpp"
#include "nocsynth/primitives.hpp"

namespace nocsynth {

/// A primitive placed onto host vertices. mapping[i] is the host node that
/// primitive vertex i+1 maps to; covered is the image of the representation
/// edge set. Field order fixes the canonical comparison:
/// (primitive_id, covered, mapping).
struct Match {
  int primitive_id = 0;
  EdgeSet covered;
  std::vector<int> mapping;

  auto operator<=>(const Match&) const = default;
};

struct MatchList {
  std::vector<Match> matches;
  bool truncated = false;  // isomorphism timeout fired; list may be incomplete
};

/// Enumerates all placements of p's representation graph into the host as an
/// induced subgraph: every representation edge must exist between the mapped
/// nodes and no other host edge may run between them. Matches that cover the
/// same edge set (primitive automorphisms) are deduplicated, keeping the
/// lexicographically smallest mapping. Output order is canonical: by covered
/// set, then mapping.
MatchList enumerate_matches(const Acg& host, const CommPrimitive& p,
                            std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

/// Independent structural check: mapping injective, onto existing host nodes,
/// every representation edge present in the host, covered set exact.
bool verify_match(const Acg& host, const CommPrimitive& p, const Match& m);

}  // namespace nocsynth
