#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "nocsynth/energy.hpp"
#include "nocsynth/graph.hpp"
#include "nocsynth/isomorphism.hpp"
#include "nocsynth/primitives.hpp"

namespace nocsynth {

/// An edge-disjoint covering of the ACG by primitive matches plus the
/// remainder edges no match covers. matches are kept in canonical order
/// (primitive id, then covered set).
struct Decomposition {
  std::vector<Match> matches;
  EdgeSet remainder;
  double cost = 0.0;
  bool truncated = false;  // some isomorphism enumeration hit its timeout
};

struct Constraints {
  std::optional<double> max_link_bandwidth;       // bits/s per physical link
  std::optional<double> max_bisection_bandwidth;  // bits/s across any balanced cut

  static Constraints unlimited() { return {}; }
  bool limited() const { return max_link_bandwidth || max_bisection_bandwidth; }
};

struct DecomposeOptions {
  std::chrono::milliseconds iso_timeout{10000};   // per (host, primitive) call
  std::chrono::milliseconds search_timeout{0};    // whole search; 0 = unlimited
  int max_depth = 0;                              // 0 = unlimited matches per decomposition
  bool enable_pruning = true;                     // disabling must not change the result
  DistanceMetric metric = DistanceMetric::Manhattan;
};

struct DecomposeResult {
  std::optional<Decomposition> best;       // nullopt: no feasible decomposition
  bool truncated = false;
  std::vector<std::string> infeasibility;  // diagnostics when best is empty
};

/// Energy of realizing one match: every covered host edge routes its volume
/// along the primitive's internal route; each traversed implementation link
/// pays e_bit(link length) per bit of accumulated volume.
double match_cost(const Match& m, const CommPrimitive& p, const Acg& g, const EnergyModel& em,
                  DistanceMetric metric = DistanceMetric::Manhattan);

/// Remainder edges become dedicated point-to-point links with penalty lambda.
double remainder_cost(const EdgeSet& r, const Acg& g, const EnergyModel& em,
                      DistanceMetric metric = DistanceMetric::Manhattan);

/// Admissible bound on the cost of completing a partial decomposition whose
/// uncovered edges are r: any realization of an edge crosses at least one
/// router and at least the direct wire distance.
double lower_bound(const EdgeSet& r, const Acg& g, const EnergyModel& em,
                   DistanceMetric metric = DistanceMetric::Manhattan);

/// Branch-and-bound search for the feasible decomposition of minimum cost.
/// Branches over matches in canonical order with a "rest is remainder" leaf
/// at every node; prunes on current cost + lower_bound(remaining) against the
/// incumbent. Equal-cost ties prefer the decomposition with fewer remainder
/// edges (the remainder is what cannot be matched, not what happens to tie),
/// then the lexicographically smallest sequence of (primitive id, covered
/// set) pairs.
DecomposeResult decompose(const Acg& g, const Library& lib, const EnergyModel& em,
                          const Constraints& c, const DecomposeOptions& opts = {});

struct BandwidthViolation {
  int a = 0, b = 0;       // physical link endpoints
  double demand = 0.0;    // sum of mapped bandwidth requirements
  double capacity = 0.0;  // configured limit
};

/// Maps every covered edge onto its primitive route and every remainder edge
/// onto a direct link, aggregates bandwidth per physical link, and reports
/// links whose demand exceeds c.max_link_bandwidth.
std::vector<BandwidthViolation> check_bandwidth(const Decomposition& d, const Acg& g,
                                                const Library& lib, const Constraints& c);

/// Aggregated bandwidth demand per physical link implied by a decomposition.
/// Key is the unordered node pair; both directions add up.
std::vector<std::pair<VertexPair, double>> link_demands(const Decomposition& d, const Acg& g,
                                                        const Library& lib);

struct BisectionResult {
  double value = 0.0;
  bool exact = true;            // false above the exhaustive size limit
  std::vector<int> part_a;      // one side of the minimizing cut
};

/// Minimum total capacity crossing a balanced node bipartition. Exhaustive up
/// to 20 nodes, Kernighan-Lin style heuristic above that.
BisectionResult min_balanced_cut(const std::vector<int>& node_ids,
                                 const std::vector<std::pair<VertexPair, double>>& links);

/// Paper-format listing:
///   COST: <value>
///   <id>: <NAME>, Mapping: (1 <v1>), (2 <v2>), ...
///   0: Remaining Graph:
///   edge <s> <d>
std::string format_decomposition(const Decomposition& d, const Library& lib,
                                 bool with_cost = true);

}  // namespace nocsynth
