#ifndef INTERDICT_CHAIN_EVAL_HPP_
#define INTERDICT_CHAIN_EVAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "interdict/evader.hpp"
#include "interdict/graph.hpp"

namespace interdict {

/// Raised when I - M is singular for the requested start distribution, i.e.
/// some state reachable from the sources is never absorbed.
class SingularChainError : public ModelError {
 public:
  using ModelError::ModelError;
};

enum class SolveMethod {
  kAuto,        // triangular when flagged, dense LU up to dense_limit, else sparse LU
  kDense,       // LU with partial pivoting
  kTriangular,  // substitution; requires a triangular chain
  kSparse,      // sparse LU
  kIterative,   // x <- a + x M until the update is below tolerance
};

struct SolveOptions {
  SolveMethod method = SolveMethod::kAuto;
  std::size_t dense_limit = 2000;
  double iterative_tolerance = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

/// Expected traversals of one edge.
struct EdgeVisit {
  NodeId tail = 0;
  NodeId head = 0;
  EdgeId edge = kNoEdge;
  double visits = 0.0;
};

struct EvalResult {
  double expected_cost = 0.0;
  std::vector<double> visit_vector;    // aN, indexed like the chain's states
  std::vector<EdgeVisit> edge_visits;  // F_ij for every stored transition
};

/// Dense copies of the canonical blocks: M (transient), R, C (transient
/// costs) and S.
struct DenseBlocks {
  Eigen::MatrixXd transient;
  Eigen::VectorXd absorb;
  Eigen::MatrixXd transient_costs;
  Eigen::VectorXd absorb_costs;
};

DenseBlocks to_dense(const AbsorbingChain& chain);

/// Solves x (I - M) = a. States not reachable from the support of a get
/// zero visits. Throws SingularChainError when a reachable state is never
/// absorbed.
std::vector<double> solve_visit_vector(const AbsorbingChain& chain, std::span<const double> start,
                                       const SolveOptions& options = {});

/// E[c] = sum_i (aN)_i (sum_j M_ij C_ij + R_i S_i), plus F_ij = (aN)_i M_ij.
EvalResult expected_cost(const AbsorbingChain& chain, std::span<const double> start,
                         const SolveOptions& options = {});

EvalResult expected_cost(const AbsorbingChain& chain, std::span<const SourceWeight> sources,
                         const SolveOptions& options = {});

/// sum_k w_k E_k[c]. chains[k] must belong to specs[k].
double scenario_objective(std::span<const AbsorbingChain> chains,
                          std::span<const EvaderSpec> specs, const SolveOptions& options = {});

/// Builds every evader's chain under the plan and returns the scenario
/// objective. This is the function h the interdiction solvers maximize.
double evaluate_plan(const Graph& graph, std::span<const EvaderSpec> specs,
                     const InterdictionPlan& plan, const SolveOptions& options = {});

}  // namespace interdict

#endif  // INTERDICT_CHAIN_EVAL_HPP_
