#include "interdict/evader.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "interdict/tolerances.hpp"

namespace interdict {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_lambda(double lambda) {
  if (std::isnan(lambda) || lambda < 0.0) {
    throw ModelError("lambda must be nonnegative");
  }
}

// Normalizes weights in place and drops entries that underflowed to zero.
std::vector<Transition> normalized_row(std::vector<Transition> row, NodeId node) {
  double total = 0.0;
  for (const Transition& t : row) total += t.prob;
  if (!(total > 0.0)) {
    throw ModelError("node " + std::to_string(node) + " has no admissible transition");
  }
  std::vector<Transition> out;
  out.reserve(row.size());
  for (Transition t : row) {
    if (t.prob <= 0.0) continue;
    t.prob /= total;
    out.push_back(t);
  }
  return out;
}

// Transient states: every non-target node with finite distance, by node id.
std::vector<NodeId> transient_nodes(const DistanceField& field) {
  std::vector<NodeId> nodes;
  for (std::size_t v = 0; v < field.dist.size(); ++v) {
    if (static_cast<NodeId>(v) != field.target && std::isfinite(field.dist[v])) {
      nodes.push_back(static_cast<NodeId>(v));
    }
  }
  return nodes;
}

std::vector<std::int64_t> index_nodes(std::span<const NodeId> ordering, NodeId num_nodes) {
  std::vector<std::int64_t> position(static_cast<std::size_t>(num_nodes), -1);
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    position[static_cast<std::size_t>(ordering[i])] = static_cast<std::int64_t>(i);
  }
  return position;
}

// Shared skeleton of the guided models. `weights` are the per-edge lengths
// the evader ranks routes by and `field` holds distances under them; the
// excess of edge (i, j) is w_ij + d_j - d_i, snapped to zero on ties. Edge
// weights are exp(-lambda * (excess - min excess)), so the best continuation
// always has weight 1. Transition costs come from `costs`.
AbsorbingChain build_guided_chain(const Graph& graph, const DistanceField& field,
                                  std::span<const double> weights,
                                  std::span<const double> costs, double lambda) {
  const std::vector<NodeId> ordering = transient_nodes(field);
  const auto position = index_nodes(ordering, graph.num_nodes());
  const bool deterministic = std::isinf(lambda);

  std::vector<std::vector<Transition>> rows(ordering.size());
  std::vector<double> excess;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    const NodeId u = ordering[i];
    const double du = field.dist[static_cast<std::size_t>(u)];
    std::vector<Transition>& row = rows[i];
    excess.clear();
    for (EdgeId id : graph.out_edges(u)) {
      const NodeId v = graph.edge(id).head;
      const double dv = field.dist[static_cast<std::size_t>(v)];
      if (!std::isfinite(dv)) continue;
      Transition t;
      t.to = v == field.target
                 ? AbsorbingChain::kAbsorbed
                 : static_cast<std::int32_t>(position[static_cast<std::size_t>(v)]);
      t.cost = costs[static_cast<std::size_t>(id)];
      t.edge = id;
      row.push_back(t);
      const double via = weights[static_cast<std::size_t>(id)] + dv;
      excess.push_back(nearly_equal(via, du) ? 0.0 : std::max(0.0, via - du));
    }
    if (row.empty()) {
      throw ModelError("node " + std::to_string(u) + " has no edge toward the target");
    }
    const double least = *std::min_element(excess.begin(), excess.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (lambda == 0.0) {
        row[k].prob = 1.0;
      } else if (deterministic) {
        row[k].prob = excess[k] <= least ? 1.0 : 0.0;
      } else {
        row[k].prob = std::exp(-lambda * (excess[k] - least));
      }
    }
    row = normalized_row(std::move(row), u);
  }
  return AbsorbingChain(field.target, ordering, std::move(rows), false);
}

}  // namespace

void EvaderSpec::validate(const Graph& graph) const {
  if (!graph.has_node(target)) throw ModelError("evader target outside the graph");
  if (sources.empty()) throw ModelError("evader has no source");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ModelError("evader weight must be a nonnegative number");
  }
  double total = 0.0;
  std::unordered_set<NodeId> seen;
  for (const SourceWeight& s : sources) {
    if (!graph.has_node(s.node)) throw ModelError("source node outside the graph");
    if (s.node == target) throw ModelError("source coincides with the target");
    if (!(s.prob >= 0.0) || !std::isfinite(s.prob)) {
      throw ModelError("source probabilities must be nonnegative");
    }
    if (!seen.insert(s.node).second) throw ModelError("source node listed twice");
    total += s.prob;
  }
  if (std::abs(total - 1.0) > tol::kStochastic) {
    throw ModelError("source probabilities sum to " + std::to_string(total) + ", not 1");
  }
  std::visit(Overloaded{
                 [](const LeastCostGuided& m) { check_lambda(m.lambda); },
                 [](const LeastRiskGuided& m) {
                   if (!(m.lambda > 0.0)) throw ModelError("least-risk lambda must be positive");
                 },
                 [](const NonRetreating& m) {
                   std::visit(Overloaded{
                                  [](const LeastCostGuided& inner) { check_lambda(inner.lambda); },
                                  [](const LeastRiskGuided& inner) {
                                    if (!(inner.lambda > 0.0)) {
                                      throw ModelError("least-risk lambda must be positive");
                                    }
                                  }},
                              m.inner);
                 }},
             model);
}

double model_lambda(const EvaderModel& model) {
  return std::visit(Overloaded{
                        [](const LeastCostGuided& m) { return m.lambda; },
                        [](const LeastRiskGuided& m) { return m.lambda; },
                        [](const NonRetreating& m) {
                          return std::visit([](const auto& inner) { return inner.lambda; },
                                            m.inner);
                        }},
                    model);
}

EvaderModel with_lambda(const EvaderModel& model, double lambda) {
  return std::visit(Overloaded{
                        [&](const LeastCostGuided&) -> EvaderModel {
                          return LeastCostGuided{lambda};
                        },
                        [&](const LeastRiskGuided&) -> EvaderModel {
                          return LeastRiskGuided{lambda};
                        },
                        [&](const NonRetreating& m) -> EvaderModel {
                          NonRetreating out = m;
                          std::visit([&](auto& inner) { inner.lambda = lambda; }, out.inner);
                          return out;
                        }},
                    model);
}

std::string model_name(const EvaderModel& model) {
  return std::visit(Overloaded{
                        [](const LeastCostGuided&) { return std::string("least-cost"); },
                        [](const LeastRiskGuided&) { return std::string("least-risk"); },
                        [](const NonRetreating& m) {
                          return std::holds_alternative<LeastCostGuided>(m.inner)
                                     ? std::string("non-retreating-least-cost")
                                     : std::string("non-retreating-least-risk");
                        }},
                    model);
}

EvaderModel parse_model(const std::string& name, double lambda) {
  if (name == "least-cost") return LeastCostGuided{lambda};
  if (name == "least-risk") return LeastRiskGuided{lambda};
  if (name == "non-retreating-least-cost" || name == "non-retreating") {
    return NonRetreating{LeastCostGuided{lambda}};
  }
  if (name == "non-retreating-least-risk") return NonRetreating{LeastRiskGuided{lambda}};
  throw ModelError("unknown evader model '" + name + "'");
}

void validate_scenario(const Graph& graph, std::span<const EvaderSpec> specs) {
  if (specs.empty()) throw ModelError("scenario has no evaders");
  double total = 0.0;
  for (const EvaderSpec& spec : specs) {
    spec.validate(graph);
    total += spec.weight;
  }
  if (std::abs(total - 1.0) > tol::kWeightSum) {
    throw ModelError("evader weights sum to " + std::to_string(total) + ", not 1");
  }
}

AbsorbingChain::AbsorbingChain(NodeId target, std::vector<NodeId> ordering,
                               std::vector<std::vector<Transition>> rows, bool triangular)
    : target_(target), ordering_(std::move(ordering)), triangular_(triangular) {
  if (target_ < 0) throw ModelError("negative target node");
  if (rows.size() != ordering_.size()) {
    throw ModelError("row count does not match the transient state count");
  }
  NodeId max_node = target_;
  for (NodeId v : ordering_) {
    if (v < 0) throw ModelError("negative node id in chain ordering");
    max_node = std::max(max_node, v);
  }
  position_.assign(static_cast<std::size_t>(max_node) + 1, -1);
  for (std::size_t i = 0; i < ordering_.size(); ++i) {
    const NodeId v = ordering_[i];
    if (v == target_) throw ModelError("target listed as a transient state");
    auto& slot = position_[static_cast<std::size_t>(v)];
    if (slot != -1) throw ModelError("node listed twice in chain ordering");
    slot = static_cast<std::int64_t>(i);
  }

  const auto m = static_cast<std::int32_t>(ordering_.size());
  offsets_.assign(1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double total = 0.0;
    if (rows[i].empty()) {
      throw ModelError("transient state " + std::to_string(ordering_[i]) + " has an empty row");
    }
    for (const Transition& t : rows[i]) {
      if (t.to != kAbsorbed && (t.to < 0 || t.to >= m)) {
        throw ModelError("transition to an unknown state");
      }
      if (!(t.prob > 0.0) || t.prob > 1.0 + tol::kStochastic) {
        throw ModelError("transition probability outside (0, 1]");
      }
      if (!std::isfinite(t.cost)) throw ModelError("transition cost is not finite");
      if (triangular_ && t.to != kAbsorbed && t.to >= static_cast<std::int32_t>(i)) {
        throw ModelError("chain flagged triangular has a non-descending transition");
      }
      total += t.prob;
      transitions_.push_back(t);
    }
    if (std::abs(total - 1.0) > tol::kStochastic) {
      throw ModelError("row of node " + std::to_string(ordering_[i]) + " sums to " +
                       std::to_string(total));
    }
    offsets_.push_back(transitions_.size());
  }
}

AbsorbingChain AbsorbingChain::from_dense(const std::vector<std::vector<double>>& transient,
                                          const std::vector<double>& absorb,
                                          const std::vector<std::vector<double>>& transient_costs,
                                          const std::vector<double>& absorb_costs,
                                          bool triangular) {
  const std::size_t m = transient.size();
  if (absorb.size() != m || transient_costs.size() != m || absorb_costs.size() != m) {
    throw ModelError("dense chain blocks have inconsistent sizes");
  }
  std::vector<NodeId> ordering(m);
  std::iota(ordering.begin(), ordering.end(), 0);
  std::vector<std::vector<Transition>> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (transient[i].size() != m || transient_costs[i].size() != m) {
      throw ModelError("dense chain block is not square");
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (transient[i][j] != 0.0) {
        rows[i].push_back({static_cast<std::int32_t>(j), transient[i][j], transient_costs[i][j],
                           kNoEdge});
      }
    }
    if (absorb[i] != 0.0) rows[i].push_back({kAbsorbed, absorb[i], absorb_costs[i], kNoEdge});
  }
  return AbsorbingChain(static_cast<NodeId>(m), std::move(ordering), std::move(rows),
                        triangular);
}

std::span<const Transition> AbsorbingChain::row(std::size_t state) const {
  return {transitions_.data() + offsets_.at(state), offsets_.at(state + 1) - offsets_[state]};
}

std::optional<std::size_t> AbsorbingChain::index_of(NodeId node) const {
  if (node < 0 || static_cast<std::size_t>(node) >= position_.size()) return std::nullopt;
  const auto p = position_[static_cast<std::size_t>(node)];
  if (p < 0) return std::nullopt;
  return static_cast<std::size_t>(p);
}

double AbsorbingChain::absorb_prob(std::size_t state) const {
  double r = 0.0;
  for (const Transition& t : row(state)) {
    if (t.to == kAbsorbed) r += t.prob;
  }
  return r;
}

double AbsorbingChain::transient_prob(std::size_t from, std::size_t to) const {
  double p = 0.0;
  for (const Transition& t : row(from)) {
    if (t.to == static_cast<std::int32_t>(to)) p += t.prob;
  }
  return p;
}

std::vector<double> AbsorbingChain::start_vector(std::span<const SourceWeight> sources) const {
  std::vector<double> a(size(), 0.0);
  for (const SourceWeight& s : sources) {
    if (s.prob == 0.0) continue;
    auto idx = index_of(s.node);
    if (!idx) {
      throw ModelError("source node " + std::to_string(s.node) +
                       " is not a transient state (no path to the target)");
    }
    a[*idx] += s.prob;
  }
  return a;
}

bool AbsorbingChain::all_states_absorb() const {
  const std::size_t m = size();
  std::vector<std::vector<std::size_t>> preds(m);
  std::vector<std::size_t> stack;
  std::vector<bool> absorbs(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    for (const Transition& t : row(i)) {
      if (t.to == kAbsorbed) {
        if (!absorbs[i]) {
          absorbs[i] = true;
          stack.push_back(i);
        }
      } else {
        preds[static_cast<std::size_t>(t.to)].push_back(i);
      }
    }
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : preds[v]) {
      if (!absorbs[u]) {
        absorbs[u] = true;
        stack.push_back(u);
      }
    }
  }
  return std::all_of(absorbs.begin(), absorbs.end(), [](bool b) { return b; });
}

AbsorbingChain build_least_cost_chain(const Graph& graph, NodeId target, double lambda,
                                      const InterdictionPlan& plan) {
  check_lambda(lambda);
  const std::vector<double> costs = effective_costs(graph, plan);
  const DistanceField field = distances_to_target(graph, target, costs);
  return build_guided_chain(graph, field, costs, costs, lambda);
}

AbsorbingChain build_least_risk_chain(const Graph& graph, NodeId target, double lambda,
                                      const InterdictionPlan& plan) {
  check_lambda(lambda);
  if (!graph.has_evasion_probs()) {
    throw ModelError("least-risk evader needs an evasion probability on every edge");
  }
  const std::vector<double> costs = effective_costs(graph, plan);
  // -log Y' per edge: the most likely evasion route is a shortest path.
  std::vector<double> risk(graph.num_edges());
  for (std::size_t id = 0; id < risk.size(); ++id) {
    risk[id] = -std::log(*graph.edges()[id].evasion_prob);
  }
  for (EdgeId id : plan.interdicted()) {
    const double factor = plan.evasion_factor().value_or(std::exp(-plan.increment(id)));
    if (!(factor > 0.0)) throw ModelError("interdiction drives an evasion probability to zero");
    risk[static_cast<std::size_t>(id)] -= std::log(factor);
  }
  const DistanceField field = distances_to_target(graph, target, risk);
  // q_ij / q_i* = exp(-(w_ij + d_j - d_i)) with w = -log Y', so the power
  // weights of the least-risk model are the exponential weights on w.
  return build_guided_chain(graph, field, risk, costs, lambda);
}

AbsorbingChain apply_non_retreating(const AbsorbingChain& chain, const DistanceField& dist) {
  if (dist.target != chain.target()) {
    throw ModelError("distance field and chain have different targets");
  }
  const std::size_t m = chain.size();
  auto dist_of = [&](NodeId v) {
    if (v < 0 || static_cast<std::size_t>(v) >= dist.dist.size()) {
      throw ModelError("distance field does not cover chain node " + std::to_string(v));
    }
    return dist.dist[static_cast<std::size_t>(v)];
  };

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> state_dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    state_dist[i] = dist_of(chain.ordering()[i]);
    if (!std::isfinite(state_dist[i])) {
      throw ModelError("node " + std::to_string(chain.ordering()[i]) +
                       " cannot reach the target");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (state_dist[a] != state_dist[b]) return state_dist[a] < state_dist[b];
    return chain.ordering()[a] < chain.ordering()[b];
  });
  std::vector<std::int32_t> relabel(m);
  std::vector<NodeId> ordering(m);
  for (std::size_t k = 0; k < m; ++k) {
    relabel[order[k]] = static_cast<std::int32_t>(k);
    ordering[k] = chain.ordering()[order[k]];
  }

  std::vector<std::vector<Transition>> rows(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t old = order[k];
    const double here = state_dist[old];
    std::vector<Transition> kept;
    for (Transition t : chain.row(old)) {
      const double there =
          t.to == AbsorbingChain::kAbsorbed ? 0.0 : state_dist[static_cast<std::size_t>(t.to)];
      if (!strictly_less(there, here)) continue;
      if (t.to != AbsorbingChain::kAbsorbed) t.to = relabel[static_cast<std::size_t>(t.to)];
      kept.push_back(t);
    }
    rows[k] = normalized_row(std::move(kept), ordering[k]);
  }
  return AbsorbingChain(chain.target(), std::move(ordering), std::move(rows), true);
}

AbsorbingChain build_chain(const Graph& graph, const EvaderSpec& spec,
                           const InterdictionPlan& plan) {
  spec.validate(graph);
  auto guided = [&](const GuidedModel& model) {
    return std::visit(Overloaded{
                          [&](const LeastCostGuided& m) {
                            return build_least_cost_chain(graph, spec.target, m.lambda, plan);
                          },
                          [&](const LeastRiskGuided& m) {
                            return build_least_risk_chain(graph, spec.target, m.lambda, plan);
                          }},
                      model);
  };
  AbsorbingChain chain = std::visit(
      Overloaded{[&](const LeastCostGuided& m) { return guided(m); },
                 [&](const LeastRiskGuided& m) { return guided(m); },
                 [&](const NonRetreating& m) {
                   return apply_non_retreating(guided(m.inner),
                                               distances_to_target(graph, spec.target, plan));
                 }},
      spec.model);
  for (const SourceWeight& s : spec.sources) {
    if (s.prob > 0.0 && !chain.index_of(s.node)) {
      throw ModelError("source node " + std::to_string(s.node) + " cannot reach target " +
                       std::to_string(spec.target));
    }
  }
  return chain;
}

std::vector<AbsorbingChain> scenario_chains(const Graph& graph,
                                            std::span<const EvaderSpec> specs,
                                            const InterdictionPlan& plan) {
  if (specs.empty()) throw ModelError("scenario has no evaders");
  std::vector<AbsorbingChain> chains;
  chains.reserve(specs.size());
  for (const EvaderSpec& spec : specs) chains.push_back(build_chain(graph, spec, plan));
  return chains;
}

}  // namespace interdict
