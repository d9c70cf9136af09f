#include "nocsynth/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace nocsynth {

namespace {

// Backtracking matcher in the VF2 spirit: extend a partial injective mapping
// one pattern vertex at a time, preferring vertices adjacent to the mapped
// core so consistency checks prune early. Induced semantics: edge presence
// in the pattern must equal edge presence in the host on mapped pairs.
struct Matcher {
  const Acg& host;
  const CommPrimitive& prim;
  std::chrono::steady_clock::time_point deadline;
  bool timed_out = false;

  int k;
  std::vector<std::vector<bool>> pat_adj;  // [s][d] over 1..k
  std::vector<int> order;                  // pattern vertices in match order
  std::vector<int> host_ids;               // candidate host nodes, ascending
  std::vector<int> assigned;               // pattern vertex (1..k) -> host id or 0
  std::vector<char> host_used;             // index into host_ids
  std::map<int, std::size_t> host_pos;     // host id -> index in host_ids
  std::vector<std::pair<int, int>> pat_deg;  // (out, in) per pattern vertex
  long long steps = 0;

  std::vector<Match> found;

  Matcher(const Acg& h, const CommPrimitive& p, std::chrono::steady_clock::time_point dl)
      : host(h), prim(p), deadline(dl), k(p.k) {
    pat_adj.assign(k + 1, std::vector<bool>(k + 1, false));
    pat_deg.assign(k + 1, {0, 0});
    for (auto [s, d] : p.representation) {
      pat_adj[s][d] = true;
      pat_deg[s].first++;
      pat_deg[d].second++;
    }
    for (const AcgNode& n : h.nodes()) host_ids.push_back(n.id);
    for (std::size_t i = 0; i < host_ids.size(); ++i) host_pos[host_ids[i]] = i;
    host_used.assign(host_ids.size(), 0);
    assigned.assign(k + 1, 0);
    build_order();
  }

  // Connected-first ordering: start from the highest-degree pattern vertex,
  // always extend with a vertex adjacent to the core when one exists.
  void build_order() {
    std::vector<char> in_order(k + 1, 0);
    auto degree = [&](int v) { return pat_deg[v].first + pat_deg[v].second; };
    while (static_cast<int>(order.size()) < k) {
      int best = 0;
      bool best_conn = false;
      for (int v = 1; v <= k; ++v) {
        if (in_order[v]) continue;
        bool conn = false;
        for (int u : order)
          if (pat_adj[u][v] || pat_adj[v][u]) conn = true;
        if (best == 0 || (conn && !best_conn) ||
            (conn == best_conn && degree(v) > degree(best))) {
          best = v;
          best_conn = conn;
        }
      }
      order.push_back(best);
      in_order[best] = 1;
    }
  }

  bool expired() {
    if (timed_out) return true;
    if ((steps++ & 0x3f) == 0 && std::chrono::steady_clock::now() > deadline) timed_out = true;
    return timed_out;
  }

  // Host node `h` is feasible for pattern vertex `v` iff for every already
  // mapped pattern vertex u, host edges between h and assigned[u] exist in
  // exactly the directions the pattern prescribes (induced condition).
  bool feasible(int v, int hid) const {
    if (static_cast<int>(host.out_neighbors(hid).size()) < pat_deg[v].first) return false;
    if (static_cast<int>(host.in_neighbors(hid).size()) < pat_deg[v].second) return false;
    for (int u = 1; u <= k; ++u) {
      int hu = assigned[u];
      if (hu == 0 || u == v) continue;
      if (pat_adj[u][v] != host.has_edge(hu, hid)) return false;
      if (pat_adj[v][u] != host.has_edge(hid, hu)) return false;
    }
    return true;
  }

  void record() {
    Match m;
    m.primitive_id = prim.id;
    m.mapping.resize(k);
    std::vector<NodePair> cov;
    cov.reserve(prim.representation.size());
    for (int v = 1; v <= k; ++v) m.mapping[v - 1] = assigned[v];
    for (auto [s, d] : prim.representation) cov.emplace_back(assigned[s], assigned[d]);
    m.covered = EdgeSet(std::move(cov));
    found.push_back(std::move(m));
  }

  void search(std::size_t depth) {
    if (expired()) return;
    if (depth == order.size()) {
      record();
      return;
    }
    int v = order[depth];
    for (std::size_t i = 0; i < host_ids.size(); ++i) {
      if (host_used[i]) continue;
      int hid = host_ids[i];
      if (!feasible(v, hid)) continue;
      assigned[v] = hid;
      host_used[i] = 1;
      search(depth + 1);
      assigned[v] = 0;
      host_used[i] = 0;
      if (timed_out) return;
    }
  }
};

}  // namespace

MatchList enumerate_matches(const Acg& host, const CommPrimitive& p,
                            std::chrono::milliseconds timeout) {
  MatchList out;
  if (p.k > static_cast<int>(host.nodes().size())) return out;
  Matcher m(host, p, std::chrono::steady_clock::now() + timeout);
  m.search(0);
  out.truncated = m.timed_out;

  // Dedup by covered set (primitive automorphisms produce identical physical
  // coverings); keep the lexicographically smallest mapping.
  std::map<EdgeSet, Match> best;
  for (Match& cand : m.found) {
    auto it = best.find(cand.covered);
    if (it == best.end())
      best.emplace(cand.covered, std::move(cand));
    else if (cand.mapping < it->second.mapping)
      it->second = std::move(cand);
  }
  out.matches.reserve(best.size());
  for (auto& [cov, match] : best) out.matches.push_back(std::move(match));
  // std::map ordering already gives (covered, mapping) canonical order.
  return out;
}

bool verify_match(const Acg& host, const CommPrimitive& p, const Match& m) {
  if (m.primitive_id != p.id) return false;
  if (static_cast<int>(m.mapping.size()) != p.k) return false;
  std::set<int> image;
  for (int hid : m.mapping) {
    if (!host.has_node(hid)) return false;
    if (!image.insert(hid).second) return false;  // not injective
  }
  std::vector<NodePair> cov;
  for (auto [s, d] : p.representation) {
    int hs = m.mapping[s - 1], hd = m.mapping[d - 1];
    if (!host.has_edge(hs, hd)) return false;
    cov.emplace_back(hs, hd);
  }
  return EdgeSet(std::move(cov)) == m.covered;
}

}  // namespace nocsynth
