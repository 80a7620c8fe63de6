#include "interdict/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <utility>

namespace interdict {

Graph gen_grid_instance(int rows, int cols, int shortcuts, WeightRange weights,
                        std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw GraphError("grid needs at least 2 rows and 2 columns");
  if (shortcuts < 0) throw GraphError("shortcut count must be nonnegative");
  if (!(weights.min >= 0.0) || !(weights.max >= weights.min)) {
    throw GraphError("invalid weight range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(weights.min, weights.max);
  auto draw = [&] { return weights.max > weights.min ? weight(rng) : weights.min; };

  const auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> present;
  auto add = [&](NodeId u, NodeId v) {
    edges.push_back({u, v, draw(), std::nullopt});
    present.emplace(u, v);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        add(id(r, c), id(r, c + 1));
        add(id(r, c + 1), id(r, c));
      }
      if (r + 1 < rows) {
        add(id(r, c), id(r + 1, c));
        add(id(r + 1, c), id(r, c));
      }
    }
  }

  const int n = rows * cols;
  std::uniform_int_distribution<int> node(0, n - 1);
  const int max_attempts = 1000 * std::max(1, shortcuts);
  int attempts = 0;
  for (int added = 0; added < shortcuts;) {
    if (++attempts > max_attempts) {
      throw GraphError("could not place " + std::to_string(shortcuts) + " shortcuts");
    }
    const int u = node(rng);
    const int v = node(rng);
    if (u == v) continue;
    const int dr = std::abs(u / cols - v / cols);
    const int dc = std::abs(u % cols - v % cols);
    if (dr + dc == 1) continue;
    if (present.count({u, v}) != 0) continue;
    add(u, v);
    ++added;
  }
  return Graph(n, std::move(edges));
}

Fig1Instance gen_fig1_instance(double lambda) {
  // Costs split so the route totals are 9 (via 1), 8 (via 2 and 3) and 8.01.
  std::vector<Edge> edges = {
      {0, 1, 5.0, std::nullopt}, {1, 4, 2.0, std::nullopt}, {0, 2, 3.0, std::nullopt},
      {2, 4, 3.0, std::nullopt}, {0, 3, 3.0, std::nullopt}, {3, 4, 3.0, std::nullopt},
      {4, 5, 2.0, std::nullopt}, {0, 5, 8.01, std::nullopt},
  };
  Fig1Instance out{Graph(6, std::move(edges)), EvaderSpec{}};
  out.evader.sources = {{0, 1.0}};
  out.evader.target = 5;
  out.evader.model = LeastCostGuided{lambda};
  out.evader.weight = 1.0;
  return out;
}

std::vector<EvaderSpec> random_evaders(const Graph& graph, int targets, int sources_per_target,
                                       const EvaderModel& model, std::uint64_t seed) {
  const NodeId n = graph.num_nodes();
  if (targets < 1 || sources_per_target < 1) {
    throw ModelError("need at least one target and one source per target");
  }
  if (targets > n) throw ModelError("more targets than nodes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> node(0, n - 1);

  std::vector<NodeId> chosen_targets;
  while (static_cast<int>(chosen_targets.size()) < targets) {
    const NodeId t = node(rng);
    if (std::find(chosen_targets.begin(), chosen_targets.end(), t) == chosen_targets.end()) {
      chosen_targets.push_back(t);
    }
  }

  std::vector<EvaderSpec> evaders;
  for (NodeId t : chosen_targets) {
    std::vector<NodeId> eligible;
    const auto dist = distances_to_target(graph, t, InterdictionPlan{});
    for (NodeId v = 0; v < n; ++v) {
      if (v != t && std::isfinite(dist.dist[static_cast<std::size_t>(v)])) eligible.push_back(v);
    }
    if (static_cast<int>(eligible.size()) < sources_per_target) {
      throw ModelError("target " + std::to_string(t) + " is reachable from too few nodes");
    }
    std::vector<NodeId> sources;
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(sources),
                sources_per_target, rng);
    EvaderSpec spec;
    spec.target = t;
    spec.model = model;
    spec.weight = 1.0 / static_cast<double>(targets);
    for (NodeId s : sources) {
      spec.sources.push_back({s, 1.0 / static_cast<double>(sources_per_target)});
    }
    evaders.push_back(std::move(spec));
  }
  return evaders;
}

}  // namespace interdict
