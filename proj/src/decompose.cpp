#include "nocsynth/decompose.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>

namespace nocsynth {

namespace {

struct Bitset {
  std::vector<std::uint64_t> w;

  explicit Bitset(std::size_t bits = 0) : w((bits + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool test(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  bool subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] & ~o.w[i]) return false;
    return true;
  }
  void remove(const Bitset& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
  }
  void add(const Bitset& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t word : w) n += std::popcount(word);
    return n;
  }
};

// Accumulates volume (or bandwidth) onto unordered physical links following
// a match's internal routes.
void accumulate_route(const Match& m, const CommPrimitive& p, const Acg& g, bool use_bandwidth,
                      std::map<VertexPair, double>& into) {
  for (auto [s, d] : p.representation) {
    const std::vector<int>& path = route_lookup(p, s, d);
    const AcgEdge& e = g.edge(m.mapping[s - 1], m.mapping[d - 1]);
    double amount = use_bandwidth ? e.bandwidth : e.volume;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int a = m.mapping[path[i] - 1], b = m.mapping[path[i + 1] - 1];
      into[make_link(a, b)] += amount;
    }
  }
}

}  // namespace

double match_cost(const Match& m, const CommPrimitive& p, const Acg& g, const EnergyModel& em,
                  DistanceMetric metric) {
  if (!verify_match(g, p, m)) throw GraphError("match does not verify against the host graph");
  std::map<VertexPair, double> link_volume;
  accumulate_route(m, p, g, /*use_bandwidth=*/false, link_volume);
  double cost = 0.0;
  for (const auto& [link, vol] : link_volume)
    cost += e_bit(em, distance(g, link.first, link.second, metric, em)) * vol;
  return cost;
}

double remainder_cost(const EdgeSet& r, const Acg& g, const EnergyModel& em,
                      DistanceMetric metric) {
  double cost = 0.0;
  for (auto [s, d] : r)
    cost += em.lambda * e_bit(em, distance(g, s, d, metric, em)) * g.edge(s, d).volume;
  return cost;
}

double lower_bound(const EdgeSet& r, const Acg& g, const EnergyModel& em, DistanceMetric metric) {
  double cost = 0.0;
  for (auto [s, d] : r)
    cost += e_bit(em, distance(g, s, d, metric, em)) * g.edge(s, d).volume;
  return cost;
}

std::vector<std::pair<VertexPair, double>> link_demands(const Decomposition& d, const Acg& g,
                                                        const Library& lib) {
  std::map<VertexPair, double> demand;
  for (const Match& m : d.matches) {
    const CommPrimitive* p = lib.find(m.primitive_id);
    if (!p) throw GraphError("decomposition references unknown primitive id " +
                             std::to_string(m.primitive_id));
    accumulate_route(m, *p, g, /*use_bandwidth=*/true, demand);
  }
  for (auto [s, d2] : d.remainder) demand[make_link(s, d2)] += g.edge(s, d2).bandwidth;
  return {demand.begin(), demand.end()};
}

std::vector<BandwidthViolation> check_bandwidth(const Decomposition& d, const Acg& g,
                                                const Library& lib, const Constraints& c) {
  std::vector<BandwidthViolation> out;
  if (!c.max_link_bandwidth) return out;
  for (const auto& [link, demand] : link_demands(d, g, lib))
    if (demand > *c.max_link_bandwidth)
      out.push_back({link.first, link.second, demand, *c.max_link_bandwidth});
  return out;
}

BisectionResult min_balanced_cut(const std::vector<int>& node_ids,
                                 const std::vector<std::pair<VertexPair, double>>& links) {
  const int n = static_cast<int>(node_ids.size());
  if (n < 2) throw GraphError("bisection needs at least 2 nodes");

  std::map<int, int> idx;
  for (int i = 0; i < n; ++i) idx[node_ids[i]] = i;
  struct L {
    int a, b;
    double cap;
  };
  std::vector<L> ls;
  ls.reserve(links.size());
  for (const auto& [pair, cap] : links) ls.push_back({idx.at(pair.first), idx.at(pair.second), cap});

  const int half = n / 2;
  auto crossing = [&](const std::vector<char>& in_a) {
    double c = 0;
    for (const L& l : ls)
      if (in_a[l.a] != in_a[l.b]) c += l.cap;
    return c;
  };

  BisectionResult best;
  best.value = std::numeric_limits<double>::infinity();

  if (n <= 20) {
    // Enumerate subsets of size floor(n/2); for even n fixing node 0 on side A
    // avoids counting each cut twice.
    std::vector<int> comb(half);
    std::iota(comb.begin(), comb.end(), 0);
    bool fix_first = (n % 2 == 0);
    std::vector<char> in_a(n, 0);
    while (true) {
      if (!fix_first || comb[0] == 0) {
        std::fill(in_a.begin(), in_a.end(), 0);
        for (int i : comb) in_a[i] = 1;
        double c = crossing(in_a);
        if (c < best.value) {
          best.value = c;
          best.part_a.clear();
          for (int i : comb) best.part_a.push_back(node_ids[i]);
        }
      }
      // next combination
      int i = half - 1;
      while (i >= 0 && comb[i] == n - half + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < half; ++j) comb[j] = comb[j - 1] + 1;
    }
    best.exact = true;
    return best;
  }

  // Kernighan-Lin style refinement from the id-ordered split. Deterministic.
  std::vector<char> in_a(n, 0);
  for (int i = 0; i < half; ++i) in_a[i] = 1;
  double cur = crossing(in_a);
  bool improved = true;
  while (improved) {
    improved = false;
    int best_i = -1, best_j = -1;
    double best_gain = 1e-12;
    for (int i = 0; i < n; ++i) {
      if (!in_a[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (in_a[j]) continue;
        std::swap(in_a[i], in_a[j]);
        double c = crossing(in_a);
        std::swap(in_a[i], in_a[j]);
        if (cur - c > best_gain) {
          best_gain = cur - c;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i >= 0) {
      std::swap(in_a[best_i], in_a[best_j]);
      cur -= best_gain;
      improved = true;
    }
  }
  best.value = cur;
  best.exact = false;
  for (int i = 0; i < n; ++i)
    if (in_a[i]) best.part_a.push_back(node_ids[i]);
  return best;
}

namespace {

struct SearchMatch {
  Match match;
  double cost = 0.0;
  Bitset covered;
  double lb_sum = 0.0;  // lower-bound mass of the covered edges
  double rc_sum = 0.0;  // remainder-cost mass of the covered edges
};

struct Searcher {
  const Acg& g;
  const Library& lib;
  const EnergyModel& em;
  const Constraints& cons;
  const DecomposeOptions& opts;

  std::vector<SearchMatch> matches;        // canonical branch order
  std::vector<NodePair> edges;             // index -> ordered pair
  std::vector<double> edge_rcost;          // per-edge remainder cost
  std::vector<double> edge_lbcost;         // per-edge admissible bound (search-tightened)
  std::size_t uncoverable_total = 0;       // edges no match covers: forced remainder

  double incumbent_cost = std::numeric_limits<double>::infinity();
  std::size_t incumbent_remainder = 0;
  std::vector<int> incumbent_choice;
  bool have_incumbent = false;

  std::vector<int> choice;
  std::chrono::steady_clock::time_point deadline{};
  bool use_deadline = false;
  bool search_truncated = false;
  long long nodes_visited = 0;

  Searcher(const Acg& g_, const Library& lib_, const EnergyModel& em_, const Constraints& c_,
           const DecomposeOptions& o_)
      : g(g_), lib(lib_), em(em_), cons(c_), opts(o_) {}

  EdgeSet remainder_of(const Bitset& remaining) const {
    std::vector<NodePair> pairs;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (remaining.test(i)) pairs.push_back(edges[i]);
    return EdgeSet(std::move(pairs));
  }

  Decomposition build(const std::vector<int>& picked, const Bitset& remaining, double cost,
                      bool truncated) const {
    Decomposition d;
    for (int j : picked) d.matches.push_back(matches[j].match);
    d.remainder = remainder_of(remaining);
    d.cost = cost;
    d.truncated = truncated;
    return d;
  }

  // Leaf feasibility under the configured constraints: per-link aggregated
  // bandwidth and the bisection bandwidth of the would-be architecture.
  bool leaf_feasible(const std::vector<int>& picked, const Bitset& remaining,
                     std::vector<std::string>* why = nullptr) const {
    if (!cons.limited()) return true;
    Decomposition d = build(picked, remaining, 0.0, false);
    bool ok = true;
    auto demands = link_demands(d, g, lib);
    if (cons.max_link_bandwidth) {
      for (const auto& [link, demand] : demands) {
        if (demand > *cons.max_link_bandwidth) {
          ok = false;
          if (why)
            why->push_back("link " + std::to_string(link.first) + "-" +
                           std::to_string(link.second) + " demand " + format_number(demand) +
                           " exceeds max link bandwidth " +
                           format_number(*cons.max_link_bandwidth));
          else
            return false;
        }
      }
    }
    if (cons.max_bisection_bandwidth && g.nodes().size() >= 2 && !demands.empty()) {
      std::vector<int> ids;
      for (const AcgNode& nd : g.nodes()) ids.push_back(nd.id);
      BisectionResult bi = min_balanced_cut(ids, demands);
      if (bi.value > *cons.max_bisection_bandwidth) {
        ok = false;
        if (why) {
          std::string cut = "{";
          for (std::size_t i = 0; i < bi.part_a.size(); ++i)
            cut += (i ? "," : "") + std::to_string(bi.part_a[i]);
          cut += "}";
          why->push_back("bisection bandwidth " + format_number(bi.value) + " across cut " + cut +
                         " exceeds max " + format_number(*cons.max_bisection_bandwidth));
        } else {
          return false;
        }
      }
    }
    return ok;
  }

  bool expired() {
    if (search_truncated) return true;
    if (use_deadline && (++nodes_visited & 0xfff) == 0 &&
        std::chrono::steady_clock::now() > deadline)
      search_truncated = true;
    return search_truncated;
  }

  void dfs(std::size_t next, Bitset& remaining, double current, double remaining_lb,
           double remaining_rc) {
    if (expired()) return;
    // Strictly-greater pruning: an equal-cost completion may still win the
    // tie on remainder size, so equality alone cannot cut the node. The
    // epsilon absorbs drift from incremental bound updates; in integer
    // unit-cost mode all quantities are exact and it never changes a verdict.
    constexpr double kEps = 1e-9;
    if (opts.enable_pruning && have_incumbent && current + remaining_lb > incumbent_cost + kEps)
      return;

    const double leaf_total = current + remaining_rc;
    const std::size_t leaf_remainder = remaining.count();
    bool better = !have_incumbent || leaf_total < incumbent_cost ||
                  (leaf_total == incumbent_cost && leaf_remainder < incumbent_remainder);
    if (better && leaf_feasible(choice, remaining)) {
      incumbent_cost = leaf_total;
      incumbent_remainder = leaf_remainder;
      incumbent_choice = choice;
      have_incumbent = true;
    }

    if (opts.max_depth > 0 && static_cast<int>(choice.size()) >= opts.max_depth) return;

    // Children can only tie the incumbent's cost when current + lb equals it
    // (the bound is admissible). In that case they are worth exploring only
    // if some completion could still undercut the incumbent's remainder:
    // edges of `remaining` that no branchable match covers are remainder in
    // every child, which bounds the achievable remainder from below.
    bool tie_only = opts.enable_pruning && have_incumbent &&
                    current + remaining_lb >= incumbent_cost - kEps;
    if (tie_only) {
      Bitset reachable(edges.size());
      for (std::size_t j = next; j < matches.size(); ++j)
        if (matches[j].covered.subset_of(remaining)) reachable.add(matches[j].covered);
      std::size_t guaranteed_remainder = leaf_remainder - reachable.count();
      if (guaranteed_remainder >= incumbent_remainder) return;
    }

    for (std::size_t j = next; j < matches.size(); ++j) {
      const SearchMatch& sm = matches[j];
      if (!sm.covered.subset_of(remaining)) continue;
      remaining.remove(sm.covered);
      choice.push_back(static_cast<int>(j));
      dfs(j + 1, remaining, current + sm.cost, remaining_lb - sm.lb_sum,
          remaining_rc - sm.rc_sum);
      choice.pop_back();
      remaining.add(sm.covered);
      if (search_truncated) return;
    }
  }
};

}  // namespace

DecomposeResult decompose(const Acg& g, const Library& lib, const EnergyModel& em,
                          const Constraints& c, const DecomposeOptions& opts) {
  DecomposeResult result;
  Searcher s(g, lib, em, c, opts);
  if (opts.search_timeout.count() > 0) {
    s.use_deadline = true;
    s.deadline = std::chrono::steady_clock::now() + opts.search_timeout;
  }

  for (const AcgEdge& e : g.edges()) s.edges.emplace_back(e.src, e.dst);
  std::map<NodePair, std::size_t> edge_index;
  for (std::size_t i = 0; i < s.edges.size(); ++i) edge_index[s.edges[i]] = i;

  // Matches in canonical branch order: primitive id, then covered set, then
  // mapping (enumerate_matches already emits that order per primitive).
  for (const CommPrimitive& p : lib.primitives) {
    MatchList ml = enumerate_matches(g, p, opts.iso_timeout);
    result.truncated = result.truncated || ml.truncated;
    for (Match& m : ml.matches) {
      SearchMatch sm;
      sm.cost = match_cost(m, p, g, em, opts.metric);
      sm.covered = Bitset(s.edges.size());
      for (auto e : m.covered) sm.covered.set(edge_index.at(e));
      sm.match = std::move(m);
      s.matches.push_back(std::move(sm));
    }
  }

  // Edges no match can cover are remainder in every decomposition, so the
  // search bound prices them at their full remainder cost.
  Bitset coverable(s.edges.size());
  for (const SearchMatch& sm : s.matches) coverable.add(sm.covered);

  s.edge_rcost.resize(s.edges.size());
  s.edge_lbcost.resize(s.edges.size());
  double total_rc = 0, total_lb = 0;
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    auto [src, dst] = s.edges[i];
    double base = e_bit(em, distance(g, src, dst, opts.metric, em)) * g.edge(src, dst).volume;
    s.edge_rcost[i] = em.lambda * base;
    s.edge_lbcost[i] = coverable.test(i) ? base : s.edge_rcost[i];
    if (!coverable.test(i)) ++s.uncoverable_total;
    total_rc += s.edge_rcost[i];
    total_lb += s.edge_lbcost[i];
  }
  for (SearchMatch& sm : s.matches)
    for (std::size_t i = 0; i < s.edges.size(); ++i)
      if (sm.covered.test(i)) {
        sm.lb_sum += s.edge_lbcost[i];
        sm.rc_sum += s.edge_rcost[i];
      }

  Bitset all(s.edges.size());
  for (std::size_t i = 0; i < s.edges.size(); ++i) all.set(i);
  s.dfs(0, all, 0.0, total_lb, total_rc);
  result.truncated = result.truncated || s.search_truncated;

  if (!s.have_incumbent) {
    std::vector<std::string> why;
    Bitset everything(s.edges.size());
    for (std::size_t i = 0; i < s.edges.size(); ++i) everything.set(i);
    std::vector<int> none;
    s.leaf_feasible(none, everything, &why);
    result.infeasibility = std::move(why);
    return result;
  }

  Bitset remaining(s.edges.size());
  for (std::size_t i = 0; i < s.edges.size(); ++i) remaining.set(i);
  for (int j : s.incumbent_choice) remaining.remove(s.matches[j].covered);
  Decomposition best = s.build(s.incumbent_choice, remaining, s.incumbent_cost, result.truncated);
  result.best = std::move(best);
  return result;
}

std::string format_decomposition(const Decomposition& d, const Library& lib, bool with_cost) {
  std::string out;
  if (with_cost) out += "COST: " + format_number(d.cost) + "\n";
  for (const Match& m : d.matches) {
    const CommPrimitive* p = lib.find(m.primitive_id);
    out += std::to_string(m.primitive_id) + ": " + (p ? p->name : "?") + ", Mapping:";
    for (std::size_t i = 0; i < m.mapping.size(); ++i) {
      out += (i == 0 ? " " : ", ");
      out += "(" + std::to_string(i + 1) + " " + std::to_string(m.mapping[i]) + ")";
    }
    out += "\n";
  }
  out += "0: Remaining Graph:\n";
  for (auto [s, dst] : d.remainder)
    out += "edge " + std::to_string(s) + " " + std::to_string(dst) + "\n";
  return out;
}

}  // namespace nocsynth
