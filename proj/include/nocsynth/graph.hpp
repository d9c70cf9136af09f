#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nocsynth {

/// Thrown on malformed input files. `line` is 1-based, 0 when not tied to a line.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

struct GraphError : std::runtime_error {
  explicit GraphError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Position {
  double x = 0.0;  // mm
  double y = 0.0;  // mm
  bool operator==(const Position&) const = default;
};

struct AcgNode {
  int id = 0;  // >= 1
  std::optional<Position> pos;
  bool operator==(const AcgNode&) const = default;
};

struct AcgEdge {
  int src = 0;
  int dst = 0;
  double volume = 0.0;     // bits
  double bandwidth = 0.0;  // bits/s
  bool operator==(const AcgEdge&) const = default;
};

using NodePair = std::pair<int, int>;

/// Canonically sorted set of directed (src, dst) pairs. No duplicates.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::vector<NodePair> pairs);

  bool contains(NodePair e) const;
  bool subset_of(const EdgeSet& other) const;
  EdgeSet unioned(const EdgeSet& other) const;
  EdgeSet minus(const EdgeSet& other) const;
  bool intersects(const EdgeSet& other) const;

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<NodePair>& pairs() const { return pairs_; }

  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  auto operator<=>(const EdgeSet&) const = default;

 private:
  std::vector<NodePair> pairs_;  // sorted ascending, unique
};

/// Application characterization graph: directed, weighted, at most one edge
/// per ordered pair, no self-loops. Immutable after construction.
class Acg {
 public:
  Acg() = default;
  Acg(std::vector<AcgNode> nodes, std::vector<AcgEdge> edges);

  const std::vector<AcgNode>& nodes() const { return nodes_; }
  const std::vector<AcgEdge>& edges() const { return edges_; }

  bool has_node(int id) const;
  const AcgNode& node(int id) const;
  bool has_edge(int src, int dst) const;
  const AcgEdge& edge(int src, int dst) const;

  /// Node ids with an edge out of `id`, ascending.
  const std::vector<int>& out_neighbors(int id) const;
  const std::vector<int>& in_neighbors(int id) const;

  EdgeSet edge_set() const;

  bool operator==(const Acg&) const = default;

 private:
  std::vector<AcgNode> nodes_;                      // sorted by id
  std::vector<AcgEdge> edges_;                      // sorted (src, dst)
  std::map<int, std::size_t> node_index_;
  std::map<NodePair, std::size_t> edge_index_;
  std::vector<std::vector<int>> out_adj_, in_adj_;  // indexed like nodes_
};

Acg parse_acg(const std::string& text);
std::string serialize_acg(const Acg& g);

/// Returns a copy of `g` with the edges in `s` removed. Nodes (including
/// newly isolated ones) are retained. Throws GraphError if s ⊄ edges(g).
Acg remove_edges(const Acg& g, const EdgeSet& s);

/// Max over connected ordered pairs of shortest-path hop count.
/// nullopt means the graph is disconnected (infinite diameter).
std::optional<int> diameter(const Acg& g, bool treat_as_undirected);

/// Shortest double formatting that round-trips; integers print without a dot.
std::string format_number(double v);

}  // namespace nocsynth
