#ifndef INTERDICT_GRAPH_HPP_
#define INTERDICT_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace interdict {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr EdgeId kNoEdge = -1;

/// Malformed graph input: bad costs, duplicate arcs, out-of-range nodes.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evader model cannot be built or evaluated on the given instance.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  NodeId tail = 0;
  NodeId head = 0;
  double cost = 0.0;
  // Probability of passing the edge undetected, in (0, 1]. Only the
  // least-risk evader reads it.
  std::optional<double> evasion_prob;

  bool is_self_loop() const { return tail == head; }
};

/// Simple directed graph with dense node indices and CSR adjacency in both
/// directions. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Validates and indexes an edge list. Edge ids follow the input order.
  /// Throws GraphError on negative or non-finite costs, self-loops with
  /// nonzero cost, duplicate (tail, head) pairs, out-of-range endpoints and
  /// evasion probabilities outside (0, 1].
  Graph(NodeId num_nodes, std::vector<Edge> edges);

  NodeId num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }

  const Edge& edge(EdgeId id) const { return edges_.at(static_cast<std::size_t>(id)); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const EdgeId> out_edges(NodeId node) const;
  std::span<const EdgeId> in_edges(NodeId node) const;

  std::optional<EdgeId> find_edge(NodeId tail, NodeId head) const;

  /// Like find_edge, but throws GraphError for a missing edge.
  EdgeId edge_id(NodeId tail, NodeId head) const;

  bool has_node(NodeId node) const { return node >= 0 && node < num_nodes_; }

  /// True when every edge carries an evasion probability.
  bool has_evasion_probs() const;

  /// Copy of the graph without the listed edges. Edge ids are renumbered.
  Graph without_edges(std::span<const EdgeId> removed) const;

 private:
  NodeId num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<EdgeId> out_list_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_list_;
};

/// The interdiction set R together with the per-edge cost increments D and
/// the budget. Edges keep their insertion order.
class InterdictionPlan {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  explicit InterdictionPlan(double default_increment = 0.0,
                            std::size_t budget = kUnbounded);

  /// Adds an edge to R. Throws std::invalid_argument when the edge is
  /// already present, the budget is exhausted or the increment is negative.
  void interdict(EdgeId edge, std::optional<double> increment = std::nullopt);

  bool contains(EdgeId edge) const;
  /// D for the edge; the default increment when none was given.
  double increment(EdgeId edge) const;

  std::span<const EdgeId> interdicted() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  std::size_t budget() const { return budget_; }
  void set_budget(std::size_t budget);
  double default_increment() const { return default_increment_; }

  /// Multiplier applied to the evasion probability of interdicted edges
  /// (least-risk evader). Unset means exp(-D) for each edge.
  std::optional<double> evasion_factor() const { return evasion_factor_; }
  void set_evasion_factor(std::optional<double> factor);

  /// Throws GraphError when an edge is missing from the graph or is a
  /// self-loop (self-loops cost nothing and are never interdicted).
  void validate(const Graph& graph) const;

 private:
  double default_increment_;
  std::size_t budget_;
  std::optional<double> evasion_factor_;
  std::vector<EdgeId> edges_;
  std::vector<std::optional<double>> increments_;
};

/// C_ij + D_ij when the edge is interdicted, C_ij otherwise.
double effective_cost(const Graph& graph, EdgeId edge, const InterdictionPlan& plan);

/// effective_cost for every edge, indexed by edge id.
std::vector<double> effective_costs(const Graph& graph, const InterdictionPlan& plan);

/// Least cost from every node to a fixed target.
struct DistanceField {
  NodeId target = 0;
  std::vector<double> dist;  // +inf where the target is unreachable
  // Outgoing non-loop edges lying on some least-cost path to the target.
  std::vector<int> next_hop_count;
};

/// Dijkstra from the target over reversed edges. Costs are per edge id and
/// must be nonnegative.
DistanceField distances_to_target(const Graph& graph, NodeId target,
                                  std::span<const double> edge_costs);

DistanceField distances_to_target(const Graph& graph, NodeId target,
                                  const InterdictionPlan& plan);

/// True iff every source reaches the target along directed edges.
bool check_target_access(const Graph& graph, NodeId target,
                         std::span<const NodeId> sources);

/// Edges eligible for interdiction (all non-loop edges), by increasing id.
std::vector<EdgeId> interdictable_edges(const Graph& graph);

// Edge-list text format: one `tail head cost [evasion_prob]` per line,
// whitespace separated, `#` starts a comment. Node count is one more than the
// largest index seen.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);

}  // namespace interdict

#endif  // INTERDICT_GRAPH_HPP_
