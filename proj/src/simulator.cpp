#include "nocsynth/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <sstream>

namespace nocsynth {

std::string SimResult::csv_row(const std::string& scenario, const std::string& arch,
                               double throughput_bps) const {
  std::ostringstream os;
  os << scenario << ',' << arch << ',' << delta_cycles << ',' << format_number(avg_latency_cycles)
     << ',' << format_number(throughput_bps) << ',' << format_number(energy_joules) << ','
     << format_number(p_ave_watts);
  return os.str();
}

double throughput(std::uint64_t delta_cycles, double f_clk_hz, double block_bits) {
  if (delta_cycles == 0) throw std::invalid_argument("throughput undefined for delta = 0");
  return block_bits * f_clk_hz / static_cast<double>(delta_cycles);
}

double energy_per_block(std::uint64_t delta_cycles, double f_clk_hz, double p_ave_watts) {
  return (static_cast<double>(delta_cycles) / f_clk_hz) * p_ave_watts;
}

namespace {

struct Packet {
  int id = 0;
  int src = 0, dst = 0;
  int nflits = 1;
  int vc = 0;
  std::uint64_t inject_cycle = 0;
  std::vector<int> path;    // precomputed table walk
  std::size_t hop = 0;      // index into path of the current node
  std::uint64_t ready = 0;  // cycle from which the next hop may be requested
  bool delivered = false;
  std::uint64_t deliver_cycle = 0;

  int at() const { return path[hop]; }
  int next() const { return path[hop + 1]; }
};

// Timing convention: a packet granted a channel at cycle g sends one flit per
// cycle during [g, g+nflits-1]; its tail lands at the other end at cycle
// g+nflits, which is also the first cycle the channel is free again.
struct Engine {
  const Architecture& arch;
  const SimConfig& cfg;
  const EnergyModel& em;

  std::vector<Channel> channels;  // directed
  std::map<Channel, int> channel_id;
  std::vector<std::uint64_t> free_from;  // per channel
  std::vector<double> channel_length;
  std::vector<std::vector<int>> ports_at;  // node idx -> incoming channel ids
  std::map<int, int> node_idx;

  // FIFO per (node idx, port, vc); port 0 is injection.
  std::map<std::tuple<int, int, int>, std::deque<int>> queues;
  std::vector<int> rr_pointer;                // per channel
  std::vector<std::vector<int>> buffer_used;  // per channel per vc, flit slots
  std::multimap<std::uint64_t, std::tuple<int, int, int>> releases;  // (chan, vc, slots)
  std::multimap<std::uint64_t, int> arrivals;                        // packet requeue/delivery
  std::map<int, std::pair<int, int>> entry_port;  // packet -> (node idx, port) while queued

  std::vector<Packet> packets;
  double energy_pj = 0.0;

  Engine(const Architecture& a, const SimConfig& c, const EnergyModel& e)
      : arch(a), cfg(c), em(e) {
    for (std::size_t i = 0; i < arch.nodes.size(); ++i)
      node_idx[arch.nodes[i].id] = static_cast<int>(i);
    for (const ArchLink& l : arch.links) {
      for (Channel ch : {Channel{l.a, l.b}, Channel{l.b, l.a}}) {
        channel_id[ch] = static_cast<int>(channels.size());
        channels.push_back(ch);
        channel_length.push_back(l.length_mm);
      }
    }
    free_from.assign(channels.size(), 0);
    rr_pointer.assign(channels.size(), 0);
    buffer_used.assign(channels.size(), std::vector<int>(cfg.virtual_channels, 0));
    ports_at.assign(arch.nodes.size(), {});
    for (std::size_t i = 0; i < arch.nodes.size(); ++i) {
      int id = arch.nodes[i].id;
      for (int nb : arch.neighbors(id)) ports_at[i].push_back(channel_id.at({nb, id}));
    }
  }

  int port_of_channel(int node, int chan) const {
    const auto& ports = ports_at[node];
    for (std::size_t i = 0; i < ports.size(); ++i)
      if (ports[i] == chan) return static_cast<int>(i) + 1;
    throw SimError("channel is not a port of node");
  }

  void enqueue(int pkt_id, int nidx, int port) {
    queues[{nidx, port, packets[pkt_id].vc}].push_back(pkt_id);
    entry_port[pkt_id] = {nidx, port};
  }

  bool downstream_space(int chan, const Packet& p) const {
    if (p.next() == p.dst) return true;  // ejection is not buffered
    return buffer_used[chan][p.vc] + p.nflits <= cfg.buffer_depth;
  }

  void grant(int chan, int pkt_id, std::uint64_t now) {
    Packet& p = packets[pkt_id];
    free_from[chan] = now + p.nflits;
    energy_pj += static_cast<double>(p.nflits) * cfg.flit_bits * e_bit(em, channel_length[chan]);

    auto [nidx, port] = entry_port.at(pkt_id);
    queues[{nidx, port, p.vc}].pop_front();
    entry_port.erase(pkt_id);
    if (port != 0) {
      // Input buffer frees once the tail flit has departed this node.
      int in_chan = ports_at[nidx][port - 1];
      releases.insert({now + p.nflits, {in_chan, p.vc, p.nflits}});
    }

    std::uint64_t tail_arrival = now + p.nflits;
    if (p.next() == p.dst) {
      p.hop++;
      p.delivered = true;
      p.deliver_cycle = tail_arrival;
      arrivals.insert({tail_arrival, pkt_id});
    } else {
      buffer_used[chan][p.vc] += p.nflits;
      p.hop++;
      std::uint64_t eligible =
          (cfg.switching == Switching::StoreAndForward) ? tail_arrival : now + 1;
      p.ready = eligible;
      arrivals.insert({eligible, pkt_id});
    }
  }

  // One arbitration sweep. Round-robin across ports (0 = injection, then
  // incoming channels by source id), lowest VC first within a port.
  bool arbitrate(std::uint64_t now) {
    bool any = false;
    for (int chan = 0; chan < static_cast<int>(channels.size()); ++chan) {
      if (free_from[chan] > now) continue;
      auto [u, v] = channels[chan];
      int uidx = node_idx.at(u);
      int nports = static_cast<int>(ports_at[uidx].size()) + 1;
      int start = rr_pointer[chan];
      for (int off = 0; off < nports; ++off) {
        int port = (start + off) % nports;
        bool granted = false;
        for (int vc = 0; vc < cfg.virtual_channels && !granted; ++vc) {
          auto it = queues.find({uidx, port, vc});
          if (it == queues.end() || it->second.empty()) continue;
          const Packet& p = packets[it->second.front()];
          if (p.ready > now || p.next() != v || !downstream_space(chan, p)) continue;
          grant(chan, it->second.front(), now);
          rr_pointer[chan] = (port + 1) % nports;
          granted = true;
          any = true;
        }
        if (granted) break;
      }
    }
    return any;
  }

  // Earliest future cycle at which anything can change state.
  std::optional<std::uint64_t> next_event_after(std::uint64_t now) const {
    std::optional<std::uint64_t> next;
    auto offer = [&](std::uint64_t c) {
      if (c > now && (!next || c < *next)) next = c;
    };
    if (!releases.empty()) offer(releases.begin()->first);
    if (!arrivals.empty()) offer(arrivals.begin()->first);
    for (const auto& [key, q] : queues)
      if (!q.empty()) offer(packets[q.front()].ready);
    for (std::size_t c = 0; c < channels.size(); ++c) offer(free_from[c]);
    return next;
  }
};

}  // namespace

SimResult simulate(const Architecture& a, const RoutingTables& t, const Traffic& traffic,
                   const SimConfig& cfg, const EnergyModel& em) {
  if (cfg.flit_bits <= 0 || cfg.buffer_depth <= 0 || cfg.virtual_channels < 1 || cfg.f_clk_hz <= 0)
    throw SimError("invalid simulator configuration");

  // Deadlock gate: cyclic channel dependencies demand enough virtual channels.
  DeadlockReport dl = detect_deadlock(a, t);
  if (!dl.deadlock_free() && cfg.virtual_channels < dl.min_virtual_channels)
    throw SimError("routing has " + std::to_string(dl.cycles.size()) +
                   " channel-dependency cycle(s); need >= " +
                   std::to_string(dl.min_virtual_channels) + " virtual channels");

  Engine eng(a, cfg, em);

  SimResult res;
  std::uint64_t clock = 0;
  std::uint64_t first_injection = 0;
  std::uint64_t last_delivery = 0;
  bool saw_injection = false;
  double latency_sum = 0.0;
  std::size_t injected_total = 0;

  for (const auto& events : traffic.rounds) {
    if (events.empty()) continue;
    const std::uint64_t base = clock;

    std::vector<int> round_pkts;
    for (const InjectionEvent& ev : events) {
      if (ev.src == ev.dst) throw SimError("traffic src equals dst");
      Packet p;
      p.id = static_cast<int>(eng.packets.size());
      p.src = ev.src;
      p.dst = ev.dst;
      p.nflits = std::max(1, static_cast<int>(std::ceil(ev.payload_bits / cfg.flit_bits)));
      p.inject_cycle = base + ev.cycle;
      p.path = t.walk(ev.src, ev.dst);  // throws if undeliverable
      p.ready = p.inject_cycle;
      auto it = dl.vc_assignment.find({ev.src, ev.dst});
      p.vc = (it == dl.vc_assignment.end()) ? 0 : it->second % cfg.virtual_channels;
      if (p.nflits > cfg.buffer_depth)
        throw SimError("packet of " + std::to_string(p.nflits) +
                       " flits cannot fit buffer depth " + std::to_string(cfg.buffer_depth));
      if (!saw_injection || p.inject_cycle < first_injection) first_injection = p.inject_cycle;
      saw_injection = true;
      eng.packets.push_back(std::move(p));
      round_pkts.push_back(eng.packets.back().id);
      ++injected_total;
    }
    std::stable_sort(round_pkts.begin(), round_pkts.end(), [&](int x, int y) {
      return eng.packets[x].inject_cycle < eng.packets[y].inject_cycle;
    });
    for (int pid : round_pkts) eng.enqueue(pid, eng.node_idx.at(eng.packets[pid].src), 0);

    std::size_t pending = round_pkts.size();
    std::uint64_t now = base;
    while (pending > 0) {
      for (auto it = eng.releases.begin(); it != eng.releases.end() && it->first <= now;) {
        auto [chan, vc, slots] = it->second;
        eng.buffer_used[chan][vc] -= slots;
        it = eng.releases.erase(it);
      }
      bool progress = false;
      for (auto it = eng.arrivals.begin(); it != eng.arrivals.end() && it->first <= now;) {
        int pid = it->second;
        Packet& p = eng.packets[pid];
        if (p.delivered) {
          latency_sum += static_cast<double>(p.deliver_cycle - p.inject_cycle);
          last_delivery = std::max(last_delivery, p.deliver_cycle);
          ++res.delivered_packets;
          --pending;
        } else {
          int nidx = eng.node_idx.at(p.at());
          int in_chan = eng.channel_id.at({p.path[p.hop - 1], p.at()});
          eng.enqueue(pid, nidx, eng.port_of_channel(nidx, in_chan));
        }
        progress = true;
        it = eng.arrivals.erase(it);
      }

      if (eng.arbitrate(now)) progress = true;
      if (pending == 0) break;

      if (progress) {
        ++now;
      } else {
        auto next = eng.next_event_after(now);
        if (!next) {
          std::string blocked;
          for (const Packet& p : eng.packets)
            if (!p.delivered)
              blocked += " packet " + std::to_string(p.id) + " at node " +
                         std::to_string(p.at()) + " toward " + std::to_string(p.dst);
          throw SimError("simulation deadlocked at cycle " + std::to_string(now) + ";" + blocked);
        }
        now = *next;
      }
    }
    clock = last_delivery + 1 + cfg.compute_delay_cycles;
  }

  if (injected_total != res.delivered_packets)
    throw SimError("conservation violated: injected " + std::to_string(injected_total) +
                   ", delivered " + std::to_string(res.delivered_packets));

  res.delta_cycles = saw_injection ? last_delivery - first_injection : 0;
  res.avg_latency_cycles =
      res.delivered_packets ? latency_sum / static_cast<double>(res.delivered_packets) : 0.0;
  res.energy_joules = eng.energy_pj * 1e-12;
  double seconds = static_cast<double>(res.delta_cycles) / cfg.f_clk_hz;
  res.p_ave_watts = seconds > 0 ? res.energy_joules / seconds : 0.0;
  return res;
}

std::pair<Architecture, RoutingTables> mesh_baseline(int rows, int cols, double spacing_mm,
                                                     double link_capacity) {
  if (rows < 1 || cols < 1 || rows * cols < 2) throw GraphError("mesh needs at least 2 nodes");
  Architecture a;
  auto id_of = [&](int x, int y) { return 1 + x + y * cols; };
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x)
      a.nodes.push_back({id_of(x, y), Position{x * spacing_mm, y * spacing_mm}});
  std::sort(a.nodes.begin(), a.nodes.end(),
            [](const AcgNode& m, const AcgNode& n) { return m.id < n.id; });
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      if (x + 1 < cols) {
        auto key = make_link(id_of(x, y), id_of(x + 1, y));
        a.links.push_back({key.first, key.second, link_capacity, spacing_mm, {}});
      }
      if (y + 1 < rows) {
        auto key = make_link(id_of(x, y), id_of(x, y + 1));
        a.links.push_back({key.first, key.second, link_capacity, spacing_mm, {}});
      }
    }
  std::sort(a.links.begin(), a.links.end(), [](const ArchLink& l, const ArchLink& r) {
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });

  RoutingTables t;
  for (int sy = 0; sy < rows; ++sy)
    for (int sx = 0; sx < cols; ++sx)
      for (int dy = 0; dy < rows; ++dy)
        for (int dx = 0; dx < cols; ++dx) {
          if (sx == dx && sy == dy) continue;
          int next_x = sx, next_y = sy;
          if (sx != dx)
            next_x += (dx > sx) ? 1 : -1;  // X first
          else
            next_y += (dy > sy) ? 1 : -1;
          t.next_hop[id_of(sx, sy)][id_of(dx, dy)] = id_of(next_x, next_y);
        }
  return {std::move(a), std::move(t)};
}

}  // namespace nocsynth
