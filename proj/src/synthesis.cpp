#include "nocsynth/synthesis.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace nocsynth {

bool Architecture::has_link(int x, int y) const {
  auto key = make_link(x, y);
  return std::any_of(links.begin(), links.end(),
                     [&](const ArchLink& l) { return l.a == key.first && l.b == key.second; });
}

const ArchLink& Architecture::link(int x, int y) const {
  auto key = make_link(x, y);
  for (const ArchLink& l : links)
    if (l.a == key.first && l.b == key.second) return l;
  throw GraphError("no link " + std::to_string(x) + "-" + std::to_string(y));
}

std::vector<int> Architecture::neighbors(int id) const {
  std::vector<int> out;
  for (const ArchLink& l : links) {
    if (l.a == id) out.push_back(l.b);
    if (l.b == id) out.push_back(l.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool RoutingTables::has(int node, int dst) const {
  auto it = next_hop.find(node);
  return it != next_hop.end() && it->second.count(dst);
}

int RoutingTables::lookup(int node, int dst) const {
  auto it = next_hop.find(node);
  if (it != next_hop.end()) {
    auto jt = it->second.find(dst);
    if (jt != it->second.end()) return jt->second;
  }
  throw GraphError("no routing entry at node " + std::to_string(node) + " for destination " +
                   std::to_string(dst));
}

std::vector<int> RoutingTables::walk(int src, int dst) const {
  std::vector<int> path{src};
  std::set<int> seen{src};
  int cur = src;
  while (cur != dst) {
    cur = lookup(cur, dst);
    if (!seen.insert(cur).second)
      throw GraphError("routing loop walking " + std::to_string(src) + " -> " +
                       std::to_string(dst));
    path.push_back(cur);
  }
  return path;
}

Architecture glue(const Decomposition& d, const Acg& g, const Library& lib,
                  const EnergyModel& em, const GlueOptions& opts) {
  struct Acc {
    double demand = 0.0;
    std::vector<LinkOrigin> origins;
  };
  std::map<VertexPair, Acc> acc;

  for (std::size_t mi = 0; mi < d.matches.size(); ++mi) {
    const Match& m = d.matches[mi];
    const CommPrimitive* p = lib.find(m.primitive_id);
    if (!p)
      throw GraphError("decomposition references unknown primitive id " +
                       std::to_string(m.primitive_id));
    if (!verify_match(g, *p, m)) throw GraphError("decomposition match does not verify");
    for (auto [pa, pb] : p->implementation) {
      auto key = make_link(m.mapping[pa - 1], m.mapping[pb - 1]);
      acc[key].origins.push_back({static_cast<int>(mi)});
    }
  }
  for (auto [s, dst] : d.remainder) {
    if (!g.has_edge(s, dst)) throw GraphError("remainder edge is not in the graph");
    acc[make_link(s, dst)].origins.push_back({-1});
  }

  // Aggregate bandwidth demand per link so capacities are feasible by
  // construction when the bandwidth check passed.
  for (const auto& [link, demand] : link_demands(d, g, lib)) acc[link].demand = demand;

  Architecture a;
  a.nodes = g.nodes();
  for (auto& [key, v] : acc) {
    ArchLink l;
    l.a = key.first;
    l.b = key.second;
    l.length_mm = distance(g, l.a, l.b, opts.metric, em);
    l.capacity = std::max(opts.default_capacity, v.demand);
    l.origins = std::move(v.origins);
    a.links.push_back(std::move(l));
  }
  return a;
}

RoutingTables build_routing_tables(const Architecture& a, const Decomposition& d, const Acg& g,
                                   const Library& lib) {
  RoutingTables t;
  // Entry candidates carry the remaining hop count so collisions resolve to
  // the shorter route deterministically (ties: smaller next hop).
  std::map<std::pair<int, int>, std::pair<int, int>> chosen;  // (node,dst) -> (hops_left, next)

  auto offer = [&](int node, int dst, int next, int hops_left) {
    auto key = std::make_pair(node, dst);
    auto val = std::make_pair(hops_left, next);
    auto it = chosen.find(key);
    if (it == chosen.end() || val < it->second) chosen[key] = val;
  };

  for (const Match& m : d.matches) {
    const CommPrimitive* p = lib.find(m.primitive_id);
    if (!p)
      throw GraphError("decomposition references unknown primitive id " +
                       std::to_string(m.primitive_id));
    for (auto [s, dst] : p->representation) {
      const std::vector<int>& path = route_lookup(*p, s, dst);
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        int node = m.mapping[path[i] - 1];
        int next = m.mapping[path[i + 1] - 1];
        int final_dst = m.mapping[path.back() - 1];
        offer(node, final_dst, next, static_cast<int>(path.size() - 1 - i));
      }
    }
  }
  for (auto [s, dst] : d.remainder) {
    if (!g.has_edge(s, dst)) throw GraphError("remainder edge is not in the graph");
    offer(s, dst, dst, 1);
  }

  for (const auto& [key, val] : chosen) {
    if (!a.has_link(key.first, val.second))
      throw GraphError("routing entry uses a link missing from the architecture");
    t.next_hop[key.first][key.second] = val.second;
  }
  return t;
}

namespace {

// Tarjan/Johnson-style elementary cycle enumeration on the channel dependency
// graph. Channels are indexed; cycles are reported with their smallest channel
// first so the output is canonical.
struct CycleFinder {
  int n;
  const std::vector<std::vector<int>>& adj;
  std::vector<std::vector<int>> cycles;

  std::vector<char> blocked;
  std::vector<std::set<int>> blocked_on;
  std::vector<int> stack;
  int root = 0;

  CycleFinder(int n_, const std::vector<std::vector<int>>& adj_) : n(n_), adj(adj_) {}

  void unblock(int u) {
    blocked[u] = 0;
    for (int w : blocked_on[u])
      if (blocked[w]) unblock(w);
    blocked_on[u].clear();
  }

  bool circuit(int v) {
    bool found = false;
    stack.push_back(v);
    blocked[v] = 1;
    for (int w : adj[v]) {
      if (w < root) continue;  // only cycles whose smallest vertex is root
      if (w == root) {
        cycles.push_back(stack);
        found = true;
      } else if (!blocked[w]) {
        if (circuit(w)) found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : adj[v])
        if (w >= root) blocked_on[w].insert(v);
    }
    stack.pop_back();
    return found;
  }

  void run() {
    for (root = 0; root < n; ++root) {
      blocked.assign(n, 0);
      blocked_on.assign(n, {});
      circuit(root);
    }
  }
};

}  // namespace

DeadlockReport detect_deadlock(const Architecture& a, const RoutingTables& t) {
  DeadlockReport rep;

  // Index directed channels.
  std::vector<Channel> channels;
  std::map<Channel, int> channel_id;
  for (const ArchLink& l : a.links) {
    channel_id[{l.a, l.b}] = static_cast<int>(channels.size());
    channels.push_back({l.a, l.b});
    channel_id[{l.b, l.a}] = static_cast<int>(channels.size());
    channels.push_back({l.b, l.a});
  }

  // Walk every table entry; consecutive channels on a walk form a dependency.
  std::set<std::pair<int, int>> deps;
  std::vector<NodePair> routed_pairs;
  for (const auto& [node, entries] : t.next_hop)
    for (const auto& [dst, next] : entries) {
      (void)next;
      routed_pairs.push_back({node, dst});
      std::vector<int> path = t.walk(node, dst);
      for (std::size_t i = 0; i + 2 < path.size(); ++i) {
        int c1 = channel_id.at({path[i], path[i + 1]});
        int c2 = channel_id.at({path[i + 1], path[i + 2]});
        deps.insert({c1, c2});
      }
    }

  std::vector<std::vector<int>> adj(channels.size());
  for (auto [c1, c2] : deps) adj[c1].push_back(c2);
  for (auto& v : adj) std::sort(v.begin(), v.end());

  CycleFinder cf(static_cast<int>(channels.size()), adj);
  cf.run();
  for (const auto& cyc : cf.cycles) {
    std::vector<Channel> c;
    for (int id : cyc) c.push_back(channels[id]);
    rep.cycles.push_back(std::move(c));
  }

  // Layer routed pairs into virtual channels: first-fit into the lowest layer
  // whose dependency graph stays acyclic.
  std::sort(routed_pairs.begin(), routed_pairs.end());
  std::vector<std::set<std::pair<int, int>>> layer_deps;
  auto layer_acyclic = [&](const std::set<std::pair<int, int>>& dd) {
    std::vector<std::vector<int>> la(channels.size());
    for (auto [c1, c2] : dd) la[c1].push_back(c2);
    std::vector<int> state(channels.size(), 0);
    std::vector<int> work;
    for (int v = 0; v < static_cast<int>(channels.size()); ++v) {
      if (state[v]) continue;
      work.push_back(v);
      while (!work.empty()) {
        int u = work.back();
        if (state[u] == 0) {
          state[u] = 1;
          for (int w : la[u]) {
            if (state[w] == 1) return false;
            if (state[w] == 0) work.push_back(w);
          }
        } else {
          if (state[u] == 1) state[u] = 2;
          work.pop_back();
        }
      }
    }
    return true;
  };

  for (auto [src, dst] : routed_pairs) {
    std::vector<int> path = t.walk(src, dst);
    std::vector<std::pair<int, int>> pdeps;
    for (std::size_t i = 0; i + 2 < path.size(); ++i)
      pdeps.push_back({channel_id.at({path[i], path[i + 1]}),
                       channel_id.at({path[i + 1], path[i + 2]})});
    std::size_t layer = 0;
    for (;; ++layer) {
      if (layer == layer_deps.size()) layer_deps.emplace_back();
      auto trial = layer_deps[layer];
      trial.insert(pdeps.begin(), pdeps.end());
      if (layer_acyclic(trial)) {
        layer_deps[layer] = std::move(trial);
        break;
      }
    }
    rep.vc_assignment[{src, dst}] = static_cast<int>(layer);
  }
  rep.min_virtual_channels = std::max<std::size_t>(1, layer_deps.size());
  return rep;
}

BisectionResult bisection_bandwidth(const Architecture& a) {
  if (a.nodes.size() < 2) throw GraphError("bisection bandwidth needs at least 2 nodes");
  std::vector<int> ids;
  for (const AcgNode& n : a.nodes) ids.push_back(n.id);
  std::vector<std::pair<VertexPair, double>> links;
  for (const ArchLink& l : a.links) links.push_back({{l.a, l.b}, l.capacity});
  return min_balanced_cut(ids, links);
}

std::string serialize_architecture(const Architecture& a, const RoutingTables& t) {
  std::string out = "arch " + std::to_string(a.nodes.size()) + "\n";
  for (const AcgNode& n : a.nodes) {
    out += "node " + std::to_string(n.id) + " ";
    if (n.pos)
      out += format_number(n.pos->x) + " " + format_number(n.pos->y);
    else
      out += "- -";
    out += "\n";
  }
  for (const ArchLink& l : a.links)
    out += "link " + std::to_string(l.a) + " " + std::to_string(l.b) + " " +
           format_number(l.capacity) + " " + format_number(l.length_mm) + "\n";
  for (const auto& [node, entries] : t.next_hop)
    for (const auto& [dst, next] : entries)
      out += "route " + std::to_string(node) + " " + std::to_string(dst) + " " +
             std::to_string(next) + "\n";
  return out;
}

std::pair<Architecture, RoutingTables> parse_architecture(const std::string& text) {
  Architecture a;
  RoutingTables t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  int declared = 0;

  auto to_int = [&](const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError(lineno, "bad integer '" + s + "'");
    return v;
  };
  auto to_double = [&](const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError(lineno, "bad number '" + s + "'");
    return v;
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      toks.push_back(tok);
    }
    if (toks.empty()) continue;
    if (!saw_header) {
      if (toks[0] != "arch" || toks.size() != 2) throw ParseError(lineno, "expected 'arch <n>'");
      declared = to_int(toks[1]);
      saw_header = true;
    } else if (toks[0] == "node") {
      if (toks.size() != 4) throw ParseError(lineno, "expected 'node <id> <x> <y>'");
      AcgNode n;
      n.id = to_int(toks[1]);
      if (toks[2] == "-" && toks[3] == "-")
        n.pos = std::nullopt;
      else
        n.pos = Position{to_double(toks[2]), to_double(toks[3])};
      a.nodes.push_back(n);
    } else if (toks[0] == "link") {
      if (toks.size() != 5)
        throw ParseError(lineno, "expected 'link <a> <b> <capacity> <length_mm>'");
      ArchLink l;
      auto key = make_link(to_int(toks[1]), to_int(toks[2]));
      l.a = key.first;
      l.b = key.second;
      l.capacity = to_double(toks[3]);
      l.length_mm = to_double(toks[4]);
      a.links.push_back(l);
    } else if (toks[0] == "route") {
      if (toks.size() != 4) throw ParseError(lineno, "expected 'route <node> <dst> <next_hop>'");
      t.next_hop[to_int(toks[1])][to_int(toks[2])] = to_int(toks[3]);
    } else {
      throw ParseError(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!saw_header) throw ParseError(1, "missing 'arch <n>' header");
  if (static_cast<int>(a.nodes.size()) != declared)
    throw ParseError(lineno, "node count mismatch");
  std::sort(a.nodes.begin(), a.nodes.end(),
            [](const AcgNode& x, const AcgNode& y) { return x.id < y.id; });
  std::sort(a.links.begin(), a.links.end(), [](const ArchLink& x, const ArchLink& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  return {std::move(a), std::move(t)};
}

}  // namespace nocsynth
