#ifndef INTERDICT_INSTANCES_HPP_
#define INTERDICT_INSTANCES_HPP_

#include <cstdint>
#include <vector>

#include "interdict/evader.hpp"
#include "interdict/graph.hpp"

namespace interdict {

struct WeightRange {
  double min = 0.5;
  double max = 1.5;
};

/// rows x cols lattice with arcs in both directions between 4-neighbours,
/// plus `shortcuts` directed arcs between random non-adjacent node pairs.
/// Node (r, c) has id r * cols + c. Every arc cost is uniform in the range.
/// Throws GraphError if shortcut sampling keeps colliding.
Graph gen_grid_instance(int rows, int cols, int shortcuts, WeightRange weights,
                        std::uint64_t seed);

/// Six-node network with four source-target routes of cost 9, 8, 8 (through
/// node 4) and 8.01 (direct). Source 0, target 5.
struct Fig1Instance {
  Graph graph;
  EvaderSpec evader;
};

Fig1Instance gen_fig1_instance(double lambda = 0.0);

/// `targets` distinct random targets, each with `sources_per_target` distinct
/// uniformly weighted random sources that can reach it. Evaders share the
/// scenario weight equally.
std::vector<EvaderSpec> random_evaders(const Graph& graph, int targets, int sources_per_target,
                                       const EvaderModel& model, std::uint64_t seed);

}  // namespace interdict

#endif  // INTERDICT_INSTANCES_HPP_
