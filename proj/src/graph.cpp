#include "nocsynth/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>

namespace nocsynth {

EdgeSet::EdgeSet(std::vector<NodePair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool EdgeSet::contains(NodePair e) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), e);
}

bool EdgeSet::subset_of(const EdgeSet& other) const {
  return std::includes(other.pairs_.begin(), other.pairs_.end(), pairs_.begin(), pairs_.end());
}

EdgeSet EdgeSet::unioned(const EdgeSet& other) const {
  std::vector<NodePair> out;
  out.reserve(pairs_.size() + other.pairs_.size());
  std::set_union(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                 std::back_inserter(out));
  EdgeSet r;
  r.pairs_ = std::move(out);
  return r;
}

EdgeSet EdgeSet::minus(const EdgeSet& other) const {
  std::vector<NodePair> out;
  std::set_difference(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                      std::back_inserter(out));
  EdgeSet r;
  r.pairs_ = std::move(out);
  return r;
}

bool EdgeSet::intersects(const EdgeSet& other) const {
  auto a = pairs_.begin();
  auto b = other.pairs_.begin();
  while (a != pairs_.end() && b != other.pairs_.end()) {
    if (*a == *b) return true;
    if (*a < *b)
      ++a;
    else
      ++b;
  }
  return false;
}

Acg::Acg(std::vector<AcgNode> nodes, std::vector<AcgEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const AcgNode& a, const AcgNode& b) { return a.id < b.id; });
  std::sort(edges_.begin(), edges_.end(), [](const AcgEdge& a, const AcgEdge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const AcgNode& n = nodes_[i];
    if (n.id < 1) throw GraphError("node id must be >= 1, got " + std::to_string(n.id));
    if (!node_index_.emplace(n.id, i).second)
      throw GraphError("duplicate node id " + std::to_string(n.id));
    if (n.pos && (!std::isfinite(n.pos->x) || !std::isfinite(n.pos->y)))
      throw GraphError("non-finite position on node " + std::to_string(n.id));
  }

  out_adj_.resize(nodes_.size());
  in_adj_.resize(nodes_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const AcgEdge& e = edges_[i];
    auto where = [&](int id) {
      auto it = node_index_.find(id);
      if (it == node_index_.end())
        throw GraphError("edge endpoint " + std::to_string(id) + " is not a node");
      return it->second;
    };
    std::size_t si = where(e.src), di = where(e.dst);
    if (e.src == e.dst) throw GraphError("self-loop on node " + std::to_string(e.src));
    if (!edge_index_.emplace(NodePair{e.src, e.dst}, i).second)
      throw GraphError("duplicate edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst));
    if (!(std::isfinite(e.volume) && e.volume >= 0.0))
      throw GraphError("edge volume must be finite and non-negative");
    if (!(std::isfinite(e.bandwidth) && e.bandwidth >= 0.0))
      throw GraphError("edge bandwidth must be finite and non-negative");
    out_adj_[si].push_back(e.dst);
    in_adj_[di].push_back(e.src);
  }
  // edges_ are sorted, so adjacency lists come out ascending already.
}

bool Acg::has_node(int id) const { return node_index_.count(id) != 0; }

const AcgNode& Acg::node(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node " + std::to_string(id));
  return nodes_[it->second];
}

bool Acg::has_edge(int src, int dst) const { return edge_index_.count({src, dst}) != 0; }

const AcgEdge& Acg::edge(int src, int dst) const {
  auto it = edge_index_.find({src, dst});
  if (it == edge_index_.end())
    throw GraphError("unknown edge " + std::to_string(src) + " -> " + std::to_string(dst));
  return edges_[it->second];
}

const std::vector<int>& Acg::out_neighbors(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node " + std::to_string(id));
  return out_adj_[it->second];
}

const std::vector<int>& Acg::in_neighbors(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node " + std::to_string(id));
  return in_adj_[it->second];
}

EdgeSet Acg::edge_set() const {
  std::vector<NodePair> p;
  p.reserve(edges_.size());
  for (const AcgEdge& e : edges_) p.emplace_back(e.src, e.dst);
  return EdgeSet(std::move(p));
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
    (void)ec;
    return std::string(buf, p);
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;  // comment to end of line
    toks.push_back(t);
  }
  return toks;
}

double parse_double(const std::string& t, int line, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ParseError(line, std::string("bad ") + what + " '" + t + "'");
  return v;
}

int parse_int(const std::string& t, int line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ParseError(line, std::string("bad ") + what + " '" + t + "'");
  return v;
}

}  // namespace

Acg parse_acg(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  int declared_nodes = 0;
  std::vector<AcgNode> nodes;
  std::vector<AcgEdge> edges;

  while (std::getline(is, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (!saw_header) {
      if (toks[0] != "acg" || toks.size() != 2)
        throw ParseError(lineno, "expected header 'acg <node_count>'");
      declared_nodes = parse_int(toks[1], lineno, "node count");
      if (declared_nodes < 0) throw ParseError(lineno, "negative node count");
      saw_header = true;
      continue;
    }
    if (toks[0] == "node") {
      if (toks.size() != 4) throw ParseError(lineno, "expected 'node <id> <x_mm> <y_mm>'");
      AcgNode n;
      n.id = parse_int(toks[1], lineno, "node id");
      if (toks[2] == "-" && toks[3] == "-") {
        n.pos = std::nullopt;
      } else if (toks[2] == "-" || toks[3] == "-") {
        throw ParseError(lineno, "position must be two numbers or '- -'");
      } else {
        n.pos = Position{parse_double(toks[2], lineno, "x coordinate"),
                         parse_double(toks[3], lineno, "y coordinate")};
      }
      nodes.push_back(n);
    } else if (toks[0] == "edge") {
      if (toks.size() != 5)
        throw ParseError(lineno, "expected 'edge <src> <dst> <volume> <bandwidth>'");
      AcgEdge e;
      e.src = parse_int(toks[1], lineno, "edge source");
      e.dst = parse_int(toks[2], lineno, "edge destination");
      e.volume = parse_double(toks[3], lineno, "volume");
      e.bandwidth = parse_double(toks[4], lineno, "bandwidth");
      if (e.volume < 0) throw ParseError(lineno, "negative volume");
      if (e.bandwidth < 0) throw ParseError(lineno, "negative bandwidth");
      edges.push_back(e);
    } else {
      throw ParseError(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!saw_header) throw ParseError(1, "missing 'acg <node_count>' header");
  if (static_cast<int>(nodes.size()) != declared_nodes)
    throw ParseError(lineno, "header declares " + std::to_string(declared_nodes) + " nodes, file has " +
                                 std::to_string(nodes.size()));
  try {
    return Acg(std::move(nodes), std::move(edges));
  } catch (const GraphError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_acg(const Acg& g) {
  std::string out = "acg " + std::to_string(g.nodes().size()) + "\n";
  for (const AcgNode& n : g.nodes()) {
    out += "node " + std::to_string(n.id) + " ";
    if (n.pos)
      out += format_number(n.pos->x) + " " + format_number(n.pos->y);
    else
      out += "- -";
    out += "\n";
  }
  for (const AcgEdge& e : g.edges()) {
    out += "edge " + std::to_string(e.src) + " " + std::to_string(e.dst) + " " +
           format_number(e.volume) + " " + format_number(e.bandwidth) + "\n";
  }
  return out;
}

Acg remove_edges(const Acg& g, const EdgeSet& s) {
  if (!s.subset_of(g.edge_set())) throw GraphError("edge set to remove is not a subset of the graph");
  std::vector<AcgEdge> kept;
  kept.reserve(g.edges().size() - s.size());
  for (const AcgEdge& e : g.edges())
    if (!s.contains({e.src, e.dst})) kept.push_back(e);
  return Acg(g.nodes(), std::move(kept));
}

std::optional<int> diameter(const Acg& g, bool treat_as_undirected) {
  const auto& nodes = g.nodes();
  const std::size_t n = nodes.size();
  if (n <= 1) return 0;

  std::map<int, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[nodes[i].id] = i;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const AcgEdge& e : g.edges()) {
    adj[idx[e.src]].push_back(idx[e.dst]);
    if (treat_as_undirected) adj[idx[e.dst]].push_back(idx[e.src]);
  }

  int worst = 0;
  std::vector<int> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<std::size_t> q{s};
    std::size_t seen = 1;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          worst = std::max(worst, dist[v]);
          ++seen;
          q.push_back(v);
        }
      }
    }
    if (seen != n) return std::nullopt;  // some ordered pair unreachable
  }
  return worst;
}

}  // namespace nocsynth
