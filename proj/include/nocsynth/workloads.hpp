#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nocsynth/graph.hpp"
#include "nocsynth/primitives.hpp"
#include "nocsynth/simulator.hpp"

namespace nocsynth {

/// 16 byte-processors on a 4x4 unit grid, ids row-major. Per column all 12
/// ordered pairs (MixColumns); row 2 a directed 4-cycle (ShiftRows shift 1);
/// row 3 the 2-cycles 9<->11 and 10<->12 (shift 2); row 4 a directed 4-cycle
/// (shift 3); row 1 unshifted, no edges.
Acg aes_acg(double volume_bits = 8.0, double bandwidth = 1.0);

struct PlantedCopy {
  std::string primitive;
  std::vector<int> mapping;  // primitive vertex i+1 -> host node
};

struct PlantedAcg {
  Acg acg;
  std::vector<PlantedCopy> planted;  // generation ground truth
};

struct PlantRequest {
  std::string primitive;  // builtin name, e.g. "MGG4"
  int count = 1;
};

/// Plants primitive-representation copies on vertex sets that pairwise share
/// at most one vertex, so every copy stays recoverable, then adds noise
/// edges that never fall inside a planted vertex set. Throws GraphError when
/// the mix does not fit n.
PlantedAcg planted_acg(std::uint64_t seed, int n, const std::vector<PlantRequest>& mix,
                       int noise_edges = 0, double volume_bits = 1.0, double bandwidth = 1.0);

/// Uniform random directed graph: `edges` distinct ordered pairs.
Acg random_acg(std::uint64_t seed, int n, int edges, double volume_bits = 1.0,
               double bandwidth = 1.0);

/// One message per ACG edge per round (payload = edge volume), all injected
/// at the round start; rounds are barrier-separated.
Traffic traffic_from_acg(const Acg& g, int rounds);

/// Bernoulli-per-cycle injection: every cycle of the horizon each node emits
/// a packet toward a uniform random other node with probability `rate`.
Traffic poisson_traffic(std::uint64_t seed, const Acg& g, double rate, int horizon_cycles,
                        double payload_bits);

std::string describe_planted(const PlantedAcg& p);

}  // namespace nocsynth
