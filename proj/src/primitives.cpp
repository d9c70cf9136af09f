#include "nocsynth/primitives.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace nocsynth {

bool CommPrimitive::has_rep_edge(int s, int d) const {
  return std::find(representation.begin(), representation.end(), NodePair{s, d}) !=
         representation.end();
}

bool CommPrimitive::has_link(int a, int b) const {
  return std::find(implementation.begin(), implementation.end(), make_link(a, b)) !=
         implementation.end();
}

const CommPrimitive* Library::find(int id) const {
  for (const auto& p : primitives)
    if (p.id == id) return &p;
  return nullptr;
}

const CommPrimitive* Library::find(const std::string& name) const {
  for (const auto& p : primitives)
    if (p.name == name) return &p;
  return nullptr;
}

int schedule_rounds_lower_bound(int k) {
  int r = 0;
  int reach = 1;
  while (reach < k) {
    reach *= 2;
    ++r;
  }
  return r;
}

namespace {

CommPrimitive make_loop(int id, const std::string& name, int k) {
  CommPrimitive p;
  p.id = id;
  p.name = name;
  p.k = k;
  for (int v = 1; v <= k; ++v) {
    int w = v % k + 1;
    p.representation.push_back({v, w});
    p.implementation.push_back(make_link(v, w));
    p.routes[{v, w}] = {v, w};
  }
  // Pair up disjoint links greedily: rounds {(1,2),(3,4),...}, {(2,3),(4,5),...}, rest.
  std::vector<VertexPair> todo;
  for (int v = 1; v <= k; ++v) todo.push_back(make_link(v, v % k + 1));
  while (!todo.empty()) {
    std::vector<VertexPair> round;
    std::set<int> busy;
    for (auto it = todo.begin(); it != todo.end();) {
      if (!busy.count(it->first) && !busy.count(it->second)) {
        busy.insert(it->first);
        busy.insert(it->second);
        round.push_back(*it);
        it = todo.erase(it);
      } else {
        ++it;
      }
    }
    p.schedule.push_back(std::move(round));
  }
  return p;
}

CommPrimitive make_path(int id, const std::string& name, int k) {
  CommPrimitive p;
  p.id = id;
  p.name = name;
  p.k = k;
  for (int v = 1; v < k; ++v) {
    p.representation.push_back({v, v + 1});
    p.implementation.push_back(make_link(v, v + 1));
    p.routes[{v, v + 1}] = {v, v + 1};
  }
  std::vector<VertexPair> odd, even;
  for (int v = 1; v < k; ++v) (v % 2 ? odd : even).push_back(make_link(v, v + 1));
  p.schedule.push_back(odd);
  if (!even.empty()) p.schedule.push_back(even);
  return p;
}

}  // namespace

Library builtin_library() {
  Library lib;

  // 1: MGG4 — gossiping among 4 nodes. Representation is the full directed
  // clique; the 4-link implementation and the 2-round schedule follow the
  // (1,3)(2,4) then (1,2)(3,4) exchange pattern, so the two non-adjacent
  // pairs route through an exchange partner: 1<->4 via 3, 2<->3 via 4.
  {
    CommPrimitive p;
    p.id = 1;
    p.name = "MGG4";
    p.k = 4;
    for (int s = 1; s <= 4; ++s)
      for (int d = 1; d <= 4; ++d)
        if (s != d) p.representation.push_back({s, d});
    p.implementation = {make_link(1, 2), make_link(2, 4), make_link(4, 3), make_link(3, 1)};
    p.schedule = {{make_link(1, 3), make_link(2, 4)}, {make_link(1, 2), make_link(3, 4)}};
    for (auto [s, d] : p.representation) {
      if (p.has_link(s, d)) {
        p.routes[{s, d}] = {s, d};
      } else if ((s == 1 && d == 4) || (s == 4 && d == 1)) {
        p.routes[{s, d}] = {s, 3, d};
      } else {  // 2<->3
        p.routes[{s, d}] = {s, 4, d};
      }
    }
    lib.primitives.push_back(std::move(p));
  }

  // 2: G123 — broadcast from vertex 1 to three others on a 4-cycle.
  {
    CommPrimitive p;
    p.id = 2;
    p.name = "G123";
    p.k = 4;
    p.representation = {{1, 2}, {1, 3}, {1, 4}};
    p.implementation = {make_link(1, 2), make_link(2, 4), make_link(4, 3), make_link(3, 1)};
    p.schedule = {{make_link(1, 2)}, {make_link(1, 3), make_link(2, 4)}};
    p.routes[{1, 2}] = {1, 2};
    p.routes[{1, 3}] = {1, 3};
    p.routes[{1, 4}] = {1, 2, 4};  // 4 hears through 2, per the schedule
    lib.primitives.push_back(std::move(p));
  }

  // 3: G124 — broadcast from vertex 1 to four others on a 5-cycle.
  {
    CommPrimitive p;
    p.id = 3;
    p.name = "G124";
    p.k = 5;
    p.representation = {{1, 2}, {1, 3}, {1, 4}, {1, 5}};
    p.implementation = {make_link(1, 2), make_link(2, 3), make_link(3, 4), make_link(4, 5),
                        make_link(5, 1)};
    p.schedule = {{make_link(1, 2)}, {make_link(1, 5), make_link(2, 3)}, {make_link(4, 5)}};
    p.routes[{1, 2}] = {1, 2};
    p.routes[{1, 3}] = {1, 2, 3};
    p.routes[{1, 4}] = {1, 5, 4};
    p.routes[{1, 5}] = {1, 5};
    lib.primitives.push_back(std::move(p));
  }

  lib.primitives.push_back(make_loop(4, "L3", 3));
  lib.primitives.push_back(make_loop(5, "L4", 4));
  lib.primitives.push_back(make_loop(6, "L5", 5));
  lib.primitives.push_back(make_path(7, "P3", 3));
  lib.primitives.push_back(make_path(8, "P4", 4));
  return lib;
}

PrimitiveKind classify(const CommPrimitive& p) {
  const int k = p.k;
  const auto& rep = p.representation;
  if (static_cast<int>(rep.size()) == k * (k - 1)) {
    // all ordered pairs present?
    bool all = true;
    for (int s = 1; s <= k && all; ++s)
      for (int d = 1; d <= k && all; ++d)
        if (s != d && !p.has_rep_edge(s, d)) all = false;
    if (all) return PrimitiveKind::Gossip;
  }
  if (static_cast<int>(rep.size()) == k - 1) {
    // star from a single root?
    int root = rep.empty() ? 0 : rep[0].first;
    bool star = root != 0;
    std::set<int> dsts;
    for (auto [s, d] : rep) {
      if (s != root) star = false;
      dsts.insert(d);
    }
    if (star && static_cast<int>(dsts.size()) == k - 1 && !dsts.count(root))
      return PrimitiveKind::Broadcast;
    // chain 1->2->...->k?
    bool chain = true;
    for (int v = 1; v < k; ++v)
      if (!p.has_rep_edge(v, v + 1)) chain = false;
    if (chain) return PrimitiveKind::Path;
  }
  if (static_cast<int>(rep.size()) == k) {
    bool cycle = true;
    for (int v = 1; v <= k; ++v)
      if (!p.has_rep_edge(v, v % k + 1)) cycle = false;
    if (cycle) return PrimitiveKind::Loop;
  }
  return PrimitiveKind::Generic;
}

std::vector<std::string> validate_primitive(const CommPrimitive& p) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& m) { bad.push_back(p.name + ": " + m); };

  if (p.k < 2) fail("has fewer than 2 vertices");
  for (auto [s, d] : p.representation) {
    if (s < 1 || s > p.k || d < 1 || d > p.k || s == d)
      fail("representation edge (" + std::to_string(s) + "," + std::to_string(d) +
           ") out of range");
    else if (!p.routes.count({s, d}))
      fail("no route for representation edge (" + std::to_string(s) + "," + std::to_string(d) +
           ")");
  }

  // Every stored route (including alternatives beyond the representation)
  // must be a simple path over implementation links.
  for (const auto& [edge, path] : p.routes) {
    auto [s, d] = edge;
    if (path.size() < 2 || path.front() != s || path.back() != d) {
      fail("route for (" + std::to_string(s) + "," + std::to_string(d) +
           ") does not run from src to dst");
      continue;
    }
    std::set<int> seen;
    bool simple = true, adjacent = true;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (!seen.insert(path[i]).second) simple = false;
      if (i + 1 < path.size() && !p.has_link(path[i], path[i + 1])) adjacent = false;
    }
    if (!simple)
      fail("route for (" + std::to_string(s) + "," + std::to_string(d) + ") repeats a vertex");
    if (!adjacent)
      fail("route for (" + std::to_string(s) + "," + std::to_string(d) +
           ") uses a non-implementation link");
  }

  for (auto [a, b] : p.implementation)
    if (a < 1 || a > p.k || b < 1 || b > p.k || a == b) fail("implementation link out of range");

  // One transaction per vertex per round; every scheduled pair must be a link.
  for (std::size_t r = 0; r < p.schedule.size(); ++r) {
    std::set<int> busy;
    for (auto [a, b] : p.schedule[r]) {
      if (!p.has_link(a, b))
        fail("round " + std::to_string(r + 1) + " pair (" + std::to_string(a) + "," +
             std::to_string(b) + ") is not an implementation link");
      if (!busy.insert(a).second)
        fail("round " + std::to_string(r + 1) + ": vertex " + std::to_string(a) +
             " in two transactions");
      if (!busy.insert(b).second)
        fail("round " + std::to_string(r + 1) + ": vertex " + std::to_string(b) +
             " in two transactions");
    }
  }

  // Route length bound: never longer than the implementation diameter.
  {
    std::vector<AcgNode> nodes;
    std::vector<AcgEdge> edges;
    for (int v = 1; v <= p.k; ++v) nodes.push_back({v, std::nullopt});
    for (auto [a, b] : p.implementation) edges.push_back({a, b, 0, 0});
    try {
      Acg impl(nodes, edges);
      auto diam = diameter(impl, /*treat_as_undirected=*/true);
      if (!diam) {
        fail("implementation graph is disconnected");
      } else {
        for (const auto& [edge, path] : p.routes)
          if (static_cast<int>(path.size()) - 1 > *diam)
            fail("route for (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                 ") exceeds implementation diameter");
      }
    } catch (const GraphError& e) {
      fail(std::string("implementation graph invalid: ") + e.what());
    }
  }

  // Schedule semantics by kind: replay knowledge sets through the rounds.
  PrimitiveKind kind = classify(p);
  if (kind == PrimitiveKind::Gossip || kind == PrimitiveKind::Broadcast) {
    std::vector<std::set<int>> know(p.k + 1);
    for (int v = 1; v <= p.k; ++v) know[v] = {v};
    for (const auto& round : p.schedule) {
      for (auto [a, b] : round) {
        std::set<int> merged = know[a];
        merged.insert(know[b].begin(), know[b].end());
        know[a] = merged;
        know[b] = merged;
      }
    }
    if (kind == PrimitiveKind::Gossip) {
      for (int v = 1; v <= p.k; ++v)
        if (static_cast<int>(know[v].size()) != p.k) {
          fail("gossip schedule does not give every vertex full knowledge");
          break;
        }
    } else {
      int root = p.representation.empty() ? 1 : p.representation[0].first;
      for (int v = 1; v <= p.k; ++v)
        if (!know[v].count(root)) {
          fail("broadcast schedule does not deliver the root token to vertex " + std::to_string(v));
          break;
        }
    }
    if (static_cast<int>(p.schedule.size()) != schedule_rounds_lower_bound(p.k))
      fail("schedule has " + std::to_string(p.schedule.size()) + " rounds, optimal is " +
           std::to_string(schedule_rounds_lower_bound(p.k)));
  } else {
    // Loops/paths: every representation edge's pair must be exchanged somewhere
    // along its route.
    for (const auto& [edge, path] : p.routes) {
      (void)edge;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        bool scheduled = false;
        for (const auto& round : p.schedule)
          for (auto pr : round)
            if (pr == make_link(path[i], path[i + 1])) scheduled = true;
        if (!scheduled)
          fail("link (" + std::to_string(path[i]) + "," + std::to_string(path[i + 1]) +
               ") is routed over but never scheduled");
      }
    }
  }
  return bad;
}

const std::vector<int>& route_lookup(const CommPrimitive& p, int src, int dst) {
  auto it = p.routes.find({src, dst});
  if (it == p.routes.end())
    throw GraphError(p.name + ": (" + std::to_string(src) + "," + std::to_string(dst) +
                     ") is not a representation edge");
  return it->second;
}

namespace {

int to_int(const std::string& t, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(line, "bad integer '" + t + "'");
  return v;
}

}  // namespace

Library parse_library(const std::string& text) {
  Library lib;
  CommPrimitive* cur = nullptr;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) {
      if (t[0] == '#') break;
      toks.push_back(t);
    }
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "prim") {
      if (toks.size() != 4) throw ParseError(lineno, "expected 'prim <id> <name> <k>'");
      CommPrimitive p;
      p.id = to_int(toks[1], lineno);
      p.name = toks[2];
      p.k = to_int(toks[3], lineno);
      lib.primitives.push_back(std::move(p));
      cur = &lib.primitives.back();
    } else if (!cur) {
      throw ParseError(lineno, "'" + kw + "' before any 'prim' line");
    } else if (kw == "rep") {
      if (toks.size() != 3) throw ParseError(lineno, "expected 'rep <s> <d>'");
      cur->representation.push_back({to_int(toks[1], lineno), to_int(toks[2], lineno)});
    } else if (kw == "impl") {
      if (toks.size() != 3) throw ParseError(lineno, "expected 'impl <a> <b>'");
      cur->implementation.push_back(make_link(to_int(toks[1], lineno), to_int(toks[2], lineno)));
    } else if (kw == "round") {
      if (toks.size() != 4) throw ParseError(lineno, "expected 'round <i> <a> <b>'");
      std::size_t r = static_cast<std::size_t>(to_int(toks[1], lineno));
      if (r < 1) throw ParseError(lineno, "round index starts at 1");
      if (cur->schedule.size() < r) cur->schedule.resize(r);
      cur->schedule[r - 1].push_back(make_link(to_int(toks[2], lineno), to_int(toks[3], lineno)));
    } else if (kw == "route") {
      if (toks.size() < 5) throw ParseError(lineno, "expected 'route <s> <d> <v1> ... <vn>'");
      int s = to_int(toks[1], lineno), d = to_int(toks[2], lineno);
      std::vector<int> path;
      for (std::size_t i = 3; i < toks.size(); ++i) path.push_back(to_int(toks[i], lineno));
      cur->routes[{s, d}] = std::move(path);
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  // ids must be contiguous from 1 in listing order
  for (std::size_t i = 0; i < lib.primitives.size(); ++i)
    if (lib.primitives[i].id != static_cast<int>(i) + 1)
      throw ParseError(0, "primitive ids must be contiguous from 1 in listing order");
  return lib;
}

std::string serialize_library(const Library& lib) {
  std::string out;
  for (const auto& p : lib.primitives) {
    out += "prim " + std::to_string(p.id) + " " + p.name + " " + std::to_string(p.k) + "\n";
    for (auto [s, d] : p.representation)
      out += "rep " + std::to_string(s) + " " + std::to_string(d) + "\n";
    for (auto [a, b] : p.implementation)
      out += "impl " + std::to_string(a) + " " + std::to_string(b) + "\n";
    for (std::size_t r = 0; r < p.schedule.size(); ++r)
      for (auto [a, b] : p.schedule[r])
        out += "round " + std::to_string(r + 1) + " " + std::to_string(a) + " " +
               std::to_string(b) + "\n";
    for (const auto& [e, path] : p.routes) {
      out += "route " + std::to_string(e.first) + " " + std::to_string(e.second);
      for (int v : path) out += " " + std::to_string(v);
      out += "\n";
    }
  }
  return out;
}

}  // namespace nocsynth
