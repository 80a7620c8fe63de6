#ifndef INTERDICT_ORACLES_HPP_
#define INTERDICT_ORACLES_HPP_

// Independent checks of the closed-form evaluation: explicit path
// enumeration and Monte Carlo walks. Nothing here uses the linear solvers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "interdict/evader.hpp"
#include "interdict/graph.hpp"

namespace interdict {

struct WeightedPath {
  std::vector<NodeId> nodes;  // start node ... target
  double probability = 0.0;
  double cost = 0.0;
};

struct PathEnsemble {
  std::vector<WeightedPath> paths;
  double total_mass = 0.0;
};

class PathCapError : public std::runtime_error {
 public:
  explicit PathCapError(std::size_t cap);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

struct EnumerationOptions {
  // Cyclic chains only: walks whose probability falls below this are
  // abandoned. Acyclic chains are always enumerated in full.
  double mass_floor = 1e-12;
  std::size_t max_paths = 1'000'000;
};

/// True when no sequence of positive transitions revisits a transient state.
bool is_acyclic(const AbsorbingChain& chain);

/// Every absorbed walk (revisits allowed) with P(p) = a_start * product of
/// transition probabilities. Throws PathCapError past options.max_paths.
PathEnsemble enumerate_paths(const AbsorbingChain& chain, std::span<const double> start,
                             const EnumerationOptions& options = {});

/// Simple source-target paths of the graph, all equally likely, with base
/// edge costs. Models an evader that picks any route at random.
PathEnsemble uniform_simple_paths(const Graph& graph, NodeId source, NodeId target,
                                  std::size_t max_paths = 1'000'000);

/// sum_p P(p) c(p); divided by total_mass when renormalize is set. Throws
/// std::invalid_argument on an empty ensemble.
double oracle_expected_cost(const PathEnsemble& ensemble, bool renormalize = false);

struct WalkOptions {
  std::uint64_t walks = 1'000'000;
  std::uint64_t seed = 1;
  // Walks longer than this are censored. Zero means 100 * (states + 1).
  std::size_t step_cap = 0;
  // Independent seeded streams, run on separate threads and merged.
  unsigned shards = 1;
};

struct EdgeVisitEstimate {
  NodeId tail = 0;
  NodeId head = 0;
  EdgeId edge = kNoEdge;
  double mean = 0.0;
  double std_error = 0.0;
};

struct WalkStats {
  double mean_cost = 0.0;
  double std_error = 0.0;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;
  // One entry per stored chain transition, in chain order.
  std::vector<EdgeVisitEstimate> edge_visits;
};

/// Samples walks from the start distribution until absorption. Statistics
/// cover completed walks; throws ModelError when every walk is censored.
WalkStats simulate_walks(const AbsorbingChain& chain, std::span<const double> start,
                         const WalkOptions& options = {});

}  // namespace interdict

#endif  // INTERDICT_ORACLES_HPP_
