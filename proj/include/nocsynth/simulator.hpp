#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nocsynth/energy.hpp"
#include "nocsynth/synthesis.hpp"

namespace nocsynth {

struct InjectionEvent {
  std::uint64_t cycle = 0;  // relative to the start of its round
  int src = 0;
  int dst = 0;
  double payload_bits = 0.0;
};

/// Injection schedule. Rounds are barrier-separated: round r+1 starts only
/// after every packet of round r has drained. A plain trace is one round.
struct Traffic {
  std::vector<std::vector<InjectionEvent>> rounds;

  std::size_t total_messages() const {
    std::size_t n = 0;
    for (const auto& r : rounds) n += r.size();
    return n;
  }
};

enum class Switching { StoreAndForward, CutThrough };

struct SimConfig {
  int flit_bits = 32;
  int buffer_depth = 16;        // flits per input port per VC
  int virtual_channels = 1;
  double f_clk_hz = 100e6;
  Switching switching = Switching::StoreAndForward;
  int compute_delay_cycles = 0;  // node busy time inserted between rounds
};

struct SimResult {
  std::uint64_t delta_cycles = 0;      // first injection to last delivery
  double avg_latency_cycles = 0.0;
  std::uint64_t delivered_packets = 0;
  double energy_joules = 0.0;
  double p_ave_watts = 0.0;

  /// `scenario,arch,delta_cycles,avg_latency,throughput_bps,energy_j,p_ave_w`
  std::string csv_row(const std::string& scenario, const std::string& arch,
                      double throughput_bps) const;
};

struct SimError : std::runtime_error {
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Deterministic cycle-level simulation: one flit per link direction per
/// cycle, FIFO input buffers per port per VC, round-robin arbitration with
/// the pointer starting at the lowest port id. Refuses to run if the routing
/// has channel-dependency cycles and cfg.virtual_channels is below the
/// minimum reported by detect_deadlock.
SimResult simulate(const Architecture& a, const RoutingTables& t, const Traffic& traffic,
                   const SimConfig& cfg, const EnergyModel& em);

/// rows x cols grid with dimension-ordered (X then Y) routing for every pair.
/// Node ids are row-major starting at 1; positions on a spacing_mm grid.
std::pair<Architecture, RoutingTables> mesh_baseline(int rows, int cols, double spacing_mm = 1.0,
                                                     double link_capacity = 1.0);

/// rho = block_bits * f_clk / delta. Throws std::invalid_argument when delta is 0.
double throughput(std::uint64_t delta_cycles, double f_clk_hz, double block_bits);

/// E = (delta / f_clk) * P_ave.
double energy_per_block(std::uint64_t delta_cycles, double f_clk_hz, double p_ave_watts);

}  // namespace nocsynth
