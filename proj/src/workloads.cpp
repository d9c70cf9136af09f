#include "nocsynth/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace nocsynth {

Acg aes_acg(double volume_bits, double bandwidth) {
  std::vector<AcgNode> nodes;
  for (int i = 1; i <= 16; ++i)
    nodes.push_back({i, Position{double((i - 1) % 4), double((i - 1) / 4)}});

  std::set<NodePair> pairs;
  // Columns: all-to-all among {c, c+4, c+8, c+12}.
  for (int c = 1; c <= 4; ++c) {
    int col[4] = {c, c + 4, c + 8, c + 12};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) pairs.insert({col[i], col[j]});
  }
  // Row 2: 5 -> 6 -> 7 -> 8 -> 5.
  for (int i = 0; i < 4; ++i) pairs.insert({5 + i, 5 + (i + 1) % 4});
  // Row 3: the two 2-cycles of a shift by 2.
  pairs.insert({9, 11});
  pairs.insert({11, 9});
  pairs.insert({10, 12});
  pairs.insert({12, 10});
  // Row 4: 13 -> 14 -> 15 -> 16 -> 13.
  for (int i = 0; i < 4; ++i) pairs.insert({13 + i, 13 + (i + 1) % 4});

  std::vector<AcgEdge> edges;
  for (auto [s, d] : pairs) edges.push_back({s, d, volume_bits, bandwidth});
  return Acg(std::move(nodes), std::move(edges));
}

namespace {

void grid_positions(std::vector<AcgNode>& nodes) {
  int side = static_cast<int>(std::ceil(std::sqrt(double(nodes.size()))));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    nodes[i].pos = Position{double(i % side), double(i / side)};
}

}  // namespace

PlantedAcg planted_acg(std::uint64_t seed, int n, const std::vector<PlantRequest>& mix,
                       int noise_edges, double volume_bits, double bandwidth) {
  if (n < 1) throw GraphError("planted graph needs at least 1 node");
  Library lib = builtin_library();
  std::mt19937_64 rng(seed);

  std::vector<AcgNode> nodes;
  for (int i = 1; i <= n; ++i) nodes.push_back({i, std::nullopt});
  grid_positions(nodes);

  PlantedAcg out;
  std::set<NodePair> used_pairs;
  std::vector<std::set<int>> copy_sets;

  std::vector<const CommPrimitive*> wanted;
  for (const PlantRequest& req : mix) {
    const CommPrimitive* p = lib.find(req.primitive);
    if (!p) throw GraphError("unknown primitive '" + req.primitive + "' in mix");
    for (int i = 0; i < req.count; ++i) wanted.push_back(p);
  }

  for (const CommPrimitive* p : wanted) {
    // Draw vertex sets until one shares at most one vertex with every placed
    // copy; a bounded number of rejections, then give up as infeasible.
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i + 1;
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      std::shuffle(all.begin(), all.end(), rng);
      if (p->k > n) break;
      std::vector<int> pick(all.begin(), all.begin() + p->k);
      std::set<int> pick_set(pick.begin(), pick.end());
      bool ok = true;
      for (const auto& cs : copy_sets) {
        int shared = 0;
        for (int v : pick)
          if (cs.count(v)) ++shared;
        if (shared > 1) ok = false;
      }
      if (!ok) continue;
      for (auto [s, d] : p->representation) used_pairs.insert({pick[s - 1], pick[d - 1]});
      copy_sets.push_back(std::move(pick_set));
      out.planted.push_back({p->name, pick});
      placed = true;
    }
    if (!placed)
      throw GraphError("mix infeasible for n=" + std::to_string(n) + " (placing " + p->name + ")");
  }

  // Noise edges avoid falling inside any planted vertex set so the planted
  // structure stays recoverable.
  int added = 0, attempts = 0;
  std::uniform_int_distribution<int> pickv(1, n);
  while (added < noise_edges && attempts < 20000) {
    ++attempts;
    int s = pickv(rng), d = pickv(rng);
    if (s == d || used_pairs.count({s, d})) continue;
    bool inside = false;
    for (const auto& cs : copy_sets)
      if (cs.count(s) && cs.count(d)) inside = true;
    if (inside) continue;
    used_pairs.insert({s, d});
    ++added;
  }

  std::vector<AcgEdge> edges;
  for (auto [s, d] : used_pairs) edges.push_back({s, d, volume_bits, bandwidth});
  out.acg = Acg(std::move(nodes), std::move(edges));
  return out;
}

Acg random_acg(std::uint64_t seed, int n, int edges, double volume_bits, double bandwidth) {
  if (n < 1) throw GraphError("random graph needs at least 1 node");
  const int max_edges = n * (n - 1);
  if (edges > max_edges) throw GraphError("too many edges requested");
  std::mt19937_64 rng(seed);
  std::vector<NodePair> all;
  all.reserve(max_edges);
  for (int s = 1; s <= n; ++s)
    for (int d = 1; d <= n; ++d)
      if (s != d) all.push_back({s, d});
  std::shuffle(all.begin(), all.end(), rng);

  std::vector<AcgNode> nodes;
  for (int i = 1; i <= n; ++i) nodes.push_back({i, std::nullopt});
  grid_positions(nodes);
  std::vector<AcgEdge> es;
  for (int i = 0; i < edges; ++i) es.push_back({all[i].first, all[i].second, volume_bits, bandwidth});
  return Acg(std::move(nodes), std::move(es));
}

Traffic traffic_from_acg(const Acg& g, int rounds) {
  if (rounds < 1) throw GraphError("traffic needs at least 1 round");
  Traffic t;
  std::vector<InjectionEvent> one;
  for (const AcgEdge& e : g.edges()) one.push_back({0, e.src, e.dst, e.volume});
  for (int r = 0; r < rounds; ++r) t.rounds.push_back(one);
  return t;
}

Traffic poisson_traffic(std::uint64_t seed, const Acg& g, double rate, int horizon_cycles,
                        double payload_bits) {
  if (rate < 0 || rate > 1) throw GraphError("rate must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const auto& nodes = g.nodes();
  if (nodes.size() < 2) throw GraphError("poisson traffic needs at least 2 nodes");
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 2);

  Traffic t;
  t.rounds.emplace_back();
  for (int c = 0; c < horizon_cycles; ++c) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (coin(rng) >= rate) continue;
      std::size_t j = pick(rng);
      if (j >= i) ++j;  // uniform over the other nodes
      t.rounds[0].push_back({std::uint64_t(c), nodes[i].id, nodes[j].id, payload_bits});
    }
  }
  return t;
}

std::string describe_planted(const PlantedAcg& p) {
  std::string out;
  for (const PlantedCopy& c : p.planted) {
    out += "planted " + c.primitive;
    for (std::size_t i = 0; i < c.mapping.size(); ++i)
      out += (i ? " " : " ") + std::to_string(c.mapping[i]);
    out += "\n";
  }
  return out;
}

}  // namespace nocsynth
