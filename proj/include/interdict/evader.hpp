#ifndef INTERDICT_EVADER_HPP_
#define INTERDICT_EVADER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "interdict/graph.hpp"

namespace interdict {

/// Transition weights decay as exp(-lambda * excess), where the excess of
/// edge (i, j) is C_ij + c(p_j) - c(p_i). lambda = +inf selects the
/// deterministic limit: all mass on the least-cost continuations.
struct LeastCostGuided {
  double lambda = 0.0;
};

/// Transition weights proportional to (q_ij / q_i*)^lambda, where q_ij is
/// the best evasion probability of a route starting with (i, j).
struct LeastRiskGuided {
  double lambda = 1.0;
};

using GuidedModel = std::variant<LeastCostGuided, LeastRiskGuided>;

/// The inner model restricted to moves that strictly reduce the least-cost
/// distance to the target.
struct NonRetreating {
  GuidedModel inner;
};

using EvaderModel = std::variant<LeastCostGuided, LeastRiskGuided, NonRetreating>;

struct SourceWeight {
  NodeId node = 0;
  double prob = 0.0;
};

/// One evader (threat scenario).
struct EvaderSpec {
  std::vector<SourceWeight> sources;
  NodeId target = 0;
  EvaderModel model = LeastCostGuided{};
  double weight = 1.0;

  /// Throws ModelError when probabilities are negative or do not sum to one,
  /// a node is listed twice or lies outside the graph, or lambda is invalid.
  /// Sources at the target are rejected; the target is never transient.
  void validate(const Graph& graph) const;
};

double model_lambda(const EvaderModel& model);
EvaderModel with_lambda(const EvaderModel& model, double lambda);
std::string model_name(const EvaderModel& model);
/// Inverse of model_name: least-cost, least-risk, non-retreating-least-cost,
/// non-retreating-least-risk. Throws ModelError for anything else.
EvaderModel parse_model(const std::string& name, double lambda);

/// Throws ModelError unless the scenario weights are nonnegative and sum to 1.
void validate_scenario(const Graph& graph, std::span<const EvaderSpec> specs);

/// One outgoing transition of a transient state.
struct Transition {
  std::int32_t to = 0;  // transient index, or AbsorbingChain::kAbsorbed
  double prob = 0.0;
  double cost = 0.0;
  EdgeId edge = kNoEdge;  // originating graph edge, when known
};

/// Canonical form of an absorbing chain. Transient states are indexed
/// 0..size()-1 following ordering(); the target is the single absorbing
/// state. Rows hold the nonzero entries of [M | R] together with the costs
/// [C | S] of the same transitions. Edges out of the target are dropped.
class AbsorbingChain {
 public:
  static constexpr std::int32_t kAbsorbed = -1;

  AbsorbingChain() = default;

  /// Validates row-stochasticity and, when triangular is set, that every
  /// transient transition goes to a strictly smaller index.
  AbsorbingChain(NodeId target, std::vector<NodeId> ordering,
                 std::vector<std::vector<Transition>> rows, bool triangular);

  /// Builds a chain from dense blocks. Transient state i is node i and the
  /// target is node m; zero entries are dropped.
  static AbsorbingChain from_dense(const std::vector<std::vector<double>>& transient,
                                   const std::vector<double>& absorb,
                                   const std::vector<std::vector<double>>& transient_costs,
                                   const std::vector<double>& absorb_costs,
                                   bool triangular = false);

  std::size_t size() const { return ordering_.size(); }
  NodeId target() const { return target_; }
  std::span<const NodeId> ordering() const { return ordering_; }
  bool triangular() const { return triangular_; }

  std::span<const Transition> row(std::size_t state) const;

  /// Transient index of a node; nullopt for the target and excluded nodes.
  std::optional<std::size_t> index_of(NodeId node) const;

  /// R_i.
  double absorb_prob(std::size_t state) const;
  /// M_ij between transient states (0 when absent).
  double transient_prob(std::size_t from, std::size_t to) const;

  /// Dense start vector a over transient states. Throws ModelError when a
  /// source is not a transient state of the chain.
  std::vector<double> start_vector(std::span<const SourceWeight> sources) const;

  /// Every transient state reaches the absorbing state with positive
  /// probability (hence is absorbed with probability one).
  bool all_states_absorb() const;

  /// Number of stored (nonzero) transitions.
  std::size_t num_transitions() const { return transitions_.size(); }

 private:
  NodeId target_ = 0;
  std::vector<NodeId> ordering_;
  std::vector<std::int64_t> position_;  // node -> transient index or -1
  std::vector<std::size_t> offsets_{0};
  std::vector<Transition> transitions_;
  bool triangular_ = false;
};

/// Least-cost-guided chain for one target.
AbsorbingChain build_least_cost_chain(const Graph& graph, NodeId target, double lambda,
                                      const InterdictionPlan& plan);

/// Least-risk-guided chain for one target. Needs evasion probabilities on
/// every edge. An interdicted edge has its evasion probability multiplied by
/// plan.evasion_factor(), or by exp(-D) when no factor is set.
AbsorbingChain build_least_risk_chain(const Graph& graph, NodeId target, double lambda,
                                      const InterdictionPlan& plan);

/// Drops transitions that do not strictly approach the target under dist,
/// renormalizes the rows and reorders the states by nondecreasing distance,
/// which makes the transient block strictly lower triangular.
AbsorbingChain apply_non_retreating(const AbsorbingChain& chain, const DistanceField& dist);

/// Chain for the evader's model. Throws ModelError when a source cannot reach
/// the target.
AbsorbingChain build_chain(const Graph& graph, const EvaderSpec& spec,
                           const InterdictionPlan& plan);

/// One chain per evader, in order. Weights do not enter the chains.
std::vector<AbsorbingChain> scenario_chains(const Graph& graph,
                                            std::span<const EvaderSpec> specs,
                                            const InterdictionPlan& plan);

}  // namespace interdict

#endif  // INTERDICT_EVADER_HPP_
