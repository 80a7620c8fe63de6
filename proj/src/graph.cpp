#include "interdict/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "interdict/tolerances.hpp"

namespace interdict {

namespace {

std::uint64_t pair_key(NodeId tail, NodeId head) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(tail)) << 32) |
         static_cast<std::uint32_t>(head);
}

void build_csr(NodeId n, const std::vector<Edge>& edges, bool outgoing,
               std::vector<std::size_t>& offsets, std::vector<EdgeId>& list) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Edge& e : edges) {
    ++offsets[static_cast<std::size_t>(outgoing ? e.tail : e.head) + 1];
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  list.assign(edges.size(), kNoEdge);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t id = 0; id < edges.size(); ++id) {
    const auto node = static_cast<std::size_t>(outgoing ? edges[id].tail : edges[id].head);
    list[fill[node]++] = static_cast<EdgeId>(id);
  }
}

}  // namespace

Graph::Graph(NodeId num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  if (num_nodes_ < 0) throw GraphError("negative node count");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (const Edge& e : edges_) {
    if (!has_node(e.tail) || !has_node(e.head)) {
      throw GraphError("edge (" + std::to_string(e.tail) + "," + std::to_string(e.head) +
                       ") has an endpoint outside [0, " + std::to_string(num_nodes_) + ")");
    }
    if (!std::isfinite(e.cost) || e.cost < 0.0) {
      throw GraphError("edge (" + std::to_string(e.tail) + "," + std::to_string(e.head) +
                       ") has invalid cost");
    }
    if (e.is_self_loop() && e.cost != 0.0) {
      throw GraphError("self-loop at node " + std::to_string(e.tail) + " must have zero cost");
    }
    if (e.evasion_prob && !(*e.evasion_prob > 0.0 && *e.evasion_prob <= 1.0)) {
      throw GraphError("edge (" + std::to_string(e.tail) + "," + std::to_string(e.head) +
                       ") has evasion probability outside (0, 1]");
    }
    if (!seen.insert(pair_key(e.tail, e.head)).second) {
      throw GraphError("duplicate edge (" + std::to_string(e.tail) + "," +
                       std::to_string(e.head) + ")");
    }
  }
  build_csr(num_nodes_, edges_, true, out_offsets_, out_list_);
  build_csr(num_nodes_, edges_, false, in_offsets_, in_list_);
}

std::span<const EdgeId> Graph::out_edges(NodeId node) const {
  const auto i = static_cast<std::size_t>(node);
  return {out_list_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
}

std::span<const EdgeId> Graph::in_edges(NodeId node) const {
  const auto i = static_cast<std::size_t>(node);
  return {in_list_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
}

std::optional<EdgeId> Graph::find_edge(NodeId tail, NodeId head) const {
  if (!has_node(tail) || !has_node(head)) return std::nullopt;
  for (EdgeId id : out_edges(tail)) {
    if (edges_[static_cast<std::size_t>(id)].head == head) return id;
  }
  return std::nullopt;
}

EdgeId Graph::edge_id(NodeId tail, NodeId head) const {
  auto id = find_edge(tail, head);
  if (!id) {
    throw GraphError("no edge (" + std::to_string(tail) + "," + std::to_string(head) + ")");
  }
  return *id;
}

bool Graph::has_evasion_probs() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.evasion_prob.has_value(); });
}

Graph Graph::without_edges(std::span<const EdgeId> removed) const {
  std::vector<bool> drop(edges_.size(), false);
  for (EdgeId id : removed) drop.at(static_cast<std::size_t>(id)) = true;
  std::vector<Edge> kept;
  kept.reserve(edges_.size());
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    if (!drop[id]) kept.push_back(edges_[id]);
  }
  return Graph(num_nodes_, std::move(kept));
}

InterdictionPlan::InterdictionPlan(double default_increment, std::size_t budget)
    : default_increment_(default_increment), budget_(budget) {
  if (!(default_increment >= 0.0) || std::isnan(default_increment)) {
    throw std::invalid_argument("interdiction increment must be nonnegative");
  }
}

void InterdictionPlan::interdict(EdgeId edge, std::optional<double> increment) {
  if (contains(edge)) {
    throw std::invalid_argument("edge " + std::to_string(edge) + " is already interdicted");
  }
  if (edges_.size() >= budget_) {
    throw std::invalid_argument("interdiction budget " + std::to_string(budget_) +
                                " exhausted");
  }
  if (increment && !(*increment >= 0.0)) {
    throw std::invalid_argument("interdiction increment must be nonnegative");
  }
  edges_.push_back(edge);
  increments_.push_back(increment);
}

bool InterdictionPlan::contains(EdgeId edge) const {
  return std::find(edges_.begin(), edges_.end(), edge) != edges_.end();
}

double InterdictionPlan::increment(EdgeId edge) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i] == edge) return increments_[i].value_or(default_increment_);
  }
  return default_increment_;
}

void InterdictionPlan::set_budget(std::size_t budget) {
  if (budget < edges_.size()) {
    throw std::invalid_argument("budget below the number of interdicted edges");
  }
  budget_ = budget;
}

void InterdictionPlan::set_evasion_factor(std::optional<double> factor) {
  if (factor && !(*factor > 0.0 && *factor <= 1.0)) {
    throw std::invalid_argument("evasion factor must lie in (0, 1]");
  }
  evasion_factor_ = factor;
}

void InterdictionPlan::validate(const Graph& graph) const {
  for (EdgeId id : edges_) {
    if (id < 0 || static_cast<std::size_t>(id) >= graph.num_edges()) {
      throw GraphError("interdicted edge id " + std::to_string(id) + " is not in the graph");
    }
    if (graph.edge(id).is_self_loop()) {
      throw GraphError("self-loop edges cannot be interdicted");
    }
  }
}

double effective_cost(const Graph& graph, EdgeId edge, const InterdictionPlan& plan) {
  if (edge < 0 || static_cast<std::size_t>(edge) >= graph.num_edges()) {
    throw GraphError("unknown edge id " + std::to_string(edge));
  }
  const Edge& e = graph.edge(edge);
  if (e.is_self_loop() || !plan.contains(edge)) return e.cost;
  return e.cost + plan.increment(edge);
}

std::vector<double> effective_costs(const Graph& graph, const InterdictionPlan& plan) {
  plan.validate(graph);
  std::vector<double> costs(graph.num_edges());
  for (std::size_t id = 0; id < costs.size(); ++id) costs[id] = graph.edges()[id].cost;
  for (EdgeId id : plan.interdicted()) {
    costs[static_cast<std::size_t>(id)] += plan.increment(id);
  }
  return costs;
}

DistanceField distances_to_target(const Graph& graph, NodeId target,
                                  std::span<const double> edge_costs) {
  if (!graph.has_node(target)) throw GraphError("target node out of range");
  if (edge_costs.size() != graph.num_edges()) {
    throw std::invalid_argument("edge cost vector does not match the graph");
  }
  const auto n = static_cast<std::size_t>(graph.num_nodes());
  DistanceField field;
  field.target = target;
  field.dist.assign(n, kInfinity);
  field.next_hop_count.assign(n, 0);

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  field.dist[static_cast<std::size_t>(target)] = 0.0;
  queue.emplace(0.0, target);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > field.dist[static_cast<std::size_t>(v)]) continue;
    for (EdgeId id : graph.in_edges(v)) {
      const double c = edge_costs[static_cast<std::size_t>(id)];
      if (c < 0.0) throw std::invalid_argument("negative edge cost in Dijkstra");
      const NodeId u = graph.edge(id).tail;
      const double candidate = d + c;
      if (candidate < field.dist[static_cast<std::size_t>(u)]) {
        field.dist[static_cast<std::size_t>(u)] = candidate;
        queue.emplace(candidate, u);
      }
    }
  }

  for (std::size_t id = 0; id < graph.num_edges(); ++id) {
    const Edge& e = graph.edges()[id];
    if (e.is_self_loop()) continue;
    const double du = field.dist[static_cast<std::size_t>(e.tail)];
    const double dv = field.dist[static_cast<std::size_t>(e.head)];
    if (std::isfinite(du) && std::isfinite(dv) && nearly_equal(du, edge_costs[id] + dv)) {
      ++field.next_hop_count[static_cast<std::size_t>(e.tail)];
    }
  }
  return field;
}

DistanceField distances_to_target(const Graph& graph, NodeId target,
                                  const InterdictionPlan& plan) {
  const auto costs = effective_costs(graph, plan);
  return distances_to_target(graph, target, costs);
}

bool check_target_access(const Graph& graph, NodeId target, std::span<const NodeId> sources) {
  if (!graph.has_node(target)) return false;
  std::vector<bool> reaches(static_cast<std::size_t>(graph.num_nodes()), false);
  std::vector<NodeId> stack{target};
  reaches[static_cast<std::size_t>(target)] = true;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (EdgeId id : graph.in_edges(v)) {
      const NodeId u = graph.edge(id).tail;
      if (!reaches[static_cast<std::size_t>(u)]) {
        reaches[static_cast<std::size_t>(u)] = true;
        stack.push_back(u);
      }
    }
  }
  return std::all_of(sources.begin(), sources.end(), [&](NodeId s) {
    return graph.has_node(s) && reaches[static_cast<std::size_t>(s)];
  });
}

std::vector<EdgeId> interdictable_edges(const Graph& graph) {
  std::vector<EdgeId> out;
  out.reserve(graph.num_edges());
  for (std::size_t id = 0; id < graph.num_edges(); ++id) {
    if (!graph.edges()[id].is_self_loop()) out.push_back(static_cast<EdgeId>(id));
  }
  return out;
}

Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  NodeId max_node = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 3 && tokens.size() != 4) {
      throw GraphError("line " + std::to_string(line_no) +
                       ": expected `tail head cost [evasion_prob]`");
    }
    Edge e;
    try {
      std::size_t used = 0;
      long long tail = std::stoll(tokens[0], &used);
      if (used != tokens[0].size()) throw std::invalid_argument("tail");
      long long head = std::stoll(tokens[1], &used);
      if (used != tokens[1].size()) throw std::invalid_argument("head");
      e.cost = std::stod(tokens[2], &used);
      if (used != tokens[2].size()) throw std::invalid_argument("cost");
      if (tokens.size() == 4) {
        e.evasion_prob = std::stod(tokens[3], &used);
        if (used != tokens[3].size()) throw std::invalid_argument("evasion_prob");
      }
      if (tail < 0 || head < 0 || tail > std::numeric_limits<NodeId>::max() ||
          head > std::numeric_limits<NodeId>::max()) {
        throw std::out_of_range("node index");
      }
      e.tail = static_cast<NodeId>(tail);
      e.head = static_cast<NodeId>(head);
    } catch (const std::logic_error&) {
      throw GraphError("line " + std::to_string(line_no) + ": malformed number");
    }
    max_node = std::max({max_node, e.tail, e.head});
    edges.push_back(e);
  }
  return Graph(max_node + 1, std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# tail head cost [evasion_prob]\n";
  for (const Edge& e : graph.edges()) {
    out << e.tail << ' ' << e.head << ' ' << e.cost;
    if (e.evasion_prob) out << ' ' << *e.evasion_prob;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace interdict
