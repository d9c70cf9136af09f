#pragma once

#include <string>

#include "nocsynth/graph.hpp"

namespace nocsynth {

enum class DistanceMetric { Manhattan, Euclidean };

/// Per-bit transport energy, split into a fixed per-hop router term and a
/// length-proportional wire term. Unit-cost mode (1, 0) makes every hop cost
/// exactly 1 per bit, which keeps search costs integer-exact.
struct EnergyModel {
  double e_router_pj = 1.0;      // pJ/bit per traversed link (switch + buffer)
  double e_wire_pj_mm = 0.0;     // pJ/(bit*mm)
  double default_link_mm = 1.0;  // used when a node has no floorplan position
  double lambda = 2.0;           // remainder penalty, >= 1

  static EnergyModel unit() { return {1.0, 0.0, 1.0, 2.0}; }
  static EnergyModel linear(double e_router, double e_wire, double default_mm = 1.0,
                            double lambda = 2.0);

  bool valid() const;
};

/// Distance between two placed nodes; default_link_mm when either position is
/// absent. Throws GraphError on an unknown node.
double distance(const Acg& g, int i, int j, DistanceMetric metric, const EnergyModel& em);

/// e_router + e_wire * length. Throws std::invalid_argument on negative length.
double e_bit(const EnergyModel& m, double length_mm);

/// Parses "unit" or "linear:<e_router>,<e_wire>[,<default_mm>[,<lambda>]]".
EnergyModel parse_energy_spec(const std::string& spec);
std::string describe_energy_model(const EnergyModel& m);

}  // namespace nocsynth
