#ifndef INTERDICT_INTERDICTION_HPP_
#define INTERDICT_INTERDICTION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "interdict/chain_eval.hpp"
#include "interdict/evader.hpp"
#include "interdict/graph.hpp"

namespace interdict {

/// Source-weighted least-cost-path centrality, one score per edge id.
struct CentralityField {
  struct UnreachableSource {
    std::size_t evader = 0;
    NodeId source = 0;
  };

  std::vector<double> score;
  // Sources without a path to their target; they contribute nothing.
  std::vector<UnreachableSource> unreachable;
};

/// Centrality of one evader: sum over sources s of a_s * sigma_st(e) /
/// sigma_st, counting least-cost s-t paths under the given edge costs.
std::vector<double> evader_centrality(const Graph& graph, const EvaderSpec& spec,
                                      std::span<const double> edge_costs,
                                      std::vector<NodeId>* unreachable = nullptr);

/// Weighted sum over evaders of evader_centrality under the plan's costs.
CentralityField centrality(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan);

struct SolverReport {
  std::string solver;
  std::vector<EdgeId> chosen;  // in pick order
  // Objective before any pick, then after each pick.
  std::vector<double> objective_trajectory;
  // Seconds since the start of the run at which each trajectory entry was
  // known.
  std::vector<double> elapsed;
  // Objective evaluations spent when each trajectory entry was known.
  std::vector<std::uint64_t> evaluations_at;
  std::uint64_t evaluations = 0;
  double wall_time = 0.0;

  double final_objective() const { return objective_trajectory.back(); }
};

/// Refusal of the exhaustive solver when there are too many subsets.
class EnumerationCapError : public std::runtime_error {
 public:
  EnumerationCapError(std::uint64_t subsets, std::uint64_t cap);
  std::uint64_t subsets() const { return subsets_; }

 private:
  std::uint64_t subsets_;
};

struct SolverOptions {
  SolveOptions solve;
  // Worker threads for independent candidate evaluations (greedy,
  // exhaustive). Results do not depend on the count.
  unsigned threads = 1;
  // Greedy: stop once no candidate improves the objective.
  bool require_positive_gain = false;
  // Exhaustive: largest number of subsets it agrees to enumerate.
  std::uint64_t max_subsets = 1'000'000;
};

// All solvers extend `plan_template`: its interdicted edges stay fixed and are
// never re-picked, its increments apply to new picks, and `budget` counts the
// new picks only. Candidates are the non-loop edges; ties go to the lowest
// edge id.

/// Repeatedly interdicts the edge of highest centrality, recomputing the
/// centrality after every pick. Objective values are only reported.
SolverReport betweenness_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                                const InterdictionPlan& plan_template, std::size_t budget,
                                const SolverOptions& options = {});

/// Repeatedly interdicts the edge with the largest objective gain.
SolverReport greedy_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan_template, std::size_t budget,
                           const SolverOptions& options = {});

/// Evaluates every size-budget subset of the candidates and keeps the best.
/// Throws EnumerationCapError when C(|A|, budget) exceeds options.max_subsets.
SolverReport exhaustive_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                               const InterdictionPlan& plan_template, std::size_t budget,
                               const SolverOptions& options = {});

/// Uniform random subset of size budget. The picks are a prefix of a seeded
/// shuffle, so smaller budgets with the same seed give prefixes.
SolverReport random_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan_template, std::size_t budget,
                           std::uint64_t seed, const SolverOptions& options = {});

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace interdict

#endif  // INTERDICT_INTERDICTION_HPP_
