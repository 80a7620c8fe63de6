#include "interdict/interdiction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "interdict/tolerances.hpp"

namespace interdict {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Evaluates fn(i) for i in [0, n) on up to `threads` workers. Output order is
// by index, so results never depend on the worker count.
template <class Fn>
std::vector<double> parallel_map(std::size_t n, unsigned threads, Fn fn) {
  std::vector<double> out(n);
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void record(SolverReport& report, double objective, Clock::time_point start) {
  report.objective_trajectory.push_back(objective);
  report.elapsed.push_back(seconds_since(start));
  report.evaluations_at.push_back(report.evaluations);
}

// Plan with the template's edges, room for `budget` more picks.
InterdictionPlan extendable_plan(const InterdictionPlan& plan_template, std::size_t budget) {
  InterdictionPlan plan = plan_template;
  plan.set_budget(plan_template.size() + budget);
  return plan;
}

std::vector<EdgeId> candidate_edges(const Graph& graph, const InterdictionPlan& plan_template) {
  std::vector<EdgeId> out;
  for (EdgeId id : interdictable_edges(graph)) {
    if (!plan_template.contains(id)) out.push_back(id);
  }
  return out;
}

void check_inputs(const Graph& graph, std::span<const EvaderSpec> specs,
                  const InterdictionPlan& plan_template, std::size_t budget,
                  std::size_t candidates) {
  validate_scenario(graph, specs);
  plan_template.validate(graph);
  if (budget > candidates) {
    throw std::invalid_argument("budget " + std::to_string(budget) + " exceeds the " +
                                std::to_string(candidates) + " interdictable edges");
  }
}

// Objective trajectory over the prefixes of `chosen`, appended to the report.
void fill_prefix_trajectory(SolverReport& report, const Graph& graph,
                            std::span<const EvaderSpec> specs, InterdictionPlan plan,
                            const SolverOptions& options, Clock::time_point start) {
  ++report.evaluations;
  record(report, evaluate_plan(graph, specs, plan, options.solve), start);
  for (EdgeId id : report.chosen) {
    plan.interdict(id);
    ++report.evaluations;
    record(report, evaluate_plan(graph, specs, plan, options.solve), start);
  }
}

}  // namespace

std::vector<double> evader_centrality(const Graph& graph, const EvaderSpec& spec,
                                      std::span<const double> edge_costs,
                                      std::vector<NodeId>* unreachable) {
  const NodeId target = spec.target;
  const DistanceField field = distances_to_target(graph, target, edge_costs);
  const auto n = static_cast<std::size_t>(graph.num_nodes());
  const auto& dist = field.dist;

  // Edges on least-cost paths form a DAG unless zero-cost cycles exist.
  std::vector<bool> tight(graph.num_edges(), false);
  std::vector<int> indegree(n, 0);
  for (std::size_t id = 0; id < graph.num_edges(); ++id) {
    const Edge& e = graph.edges()[id];
    if (e.is_self_loop() || e.tail == target) continue;
    const double du = dist[static_cast<std::size_t>(e.tail)];
    const double dv = dist[static_cast<std::size_t>(e.head)];
    if (std::isfinite(du) && std::isfinite(dv) && nearly_equal(du, edge_costs[id] + dv)) {
      tight[id] = true;
      ++indegree[static_cast<std::size_t>(e.head)];
    }
  }
  std::vector<NodeId> topo;
  topo.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) topo.push_back(static_cast<NodeId>(v));
  }
  for (std::size_t k = 0; k < topo.size(); ++k) {
    for (EdgeId id : graph.out_edges(topo[k])) {
      if (!tight[static_cast<std::size_t>(id)]) continue;
      const auto v = static_cast<std::size_t>(graph.edge(id).head);
      if (--indegree[v] == 0) topo.push_back(static_cast<NodeId>(v));
    }
  }
  if (topo.size() != n) {
    throw ModelError("zero-cost cycle among least-cost paths; path counts are unbounded");
  }

  // Least-cost paths from each node to the target.
  std::vector<double> to_target(n, 0.0);
  to_target[static_cast<std::size_t>(target)] = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const NodeId u = topo[k];
    if (u == target) continue;
    double count = 0.0;
    for (EdgeId id : graph.out_edges(u)) {
      if (tight[static_cast<std::size_t>(id)]) {
        count += to_target[static_cast<std::size_t>(graph.edge(id).head)];
      }
    }
    to_target[static_cast<std::size_t>(u)] = count;
  }

  std::vector<double> score(graph.num_edges(), 0.0);
  std::vector<double> from_source(n);
  for (const SourceWeight& s : spec.sources) {
    if (s.prob <= 0.0) continue;
    const auto src = static_cast<std::size_t>(s.node);
    if (!std::isfinite(dist[src]) || to_target[src] == 0.0) {
      if (unreachable) unreachable->push_back(s.node);
      continue;
    }
    // Forward pass: least-cost prefixes from the source along tight edges.
    std::fill(from_source.begin(), from_source.end(), 0.0);
    from_source[src] = 1.0;
    for (NodeId u : topo) {
      const double prefixes = from_source[static_cast<std::size_t>(u)];
      if (prefixes == 0.0) continue;
      for (EdgeId id : graph.out_edges(u)) {
        if (!tight[static_cast<std::size_t>(id)]) continue;
        const auto v = static_cast<std::size_t>(graph.edge(id).head);
        from_source[v] += prefixes;
        score[static_cast<std::size_t>(id)] +=
            s.prob * prefixes * to_target[v] / to_target[src];
      }
    }
  }
  return score;
}

CentralityField centrality(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan) {
  const std::vector<double> costs = effective_costs(graph, plan);
  CentralityField field;
  field.score.assign(graph.num_edges(), 0.0);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::vector<NodeId> unreachable;
    const std::vector<double> h = evader_centrality(graph, specs[k], costs, &unreachable);
    for (std::size_t id = 0; id < h.size(); ++id) field.score[id] += specs[k].weight * h[id];
    for (NodeId s : unreachable) field.unreachable.push_back({k, s});
  }
  return field;
}

EnumerationCapError::EnumerationCapError(std::uint64_t subsets, std::uint64_t cap)
    : std::runtime_error("exhaustive search refused: " + std::to_string(subsets) +
                         " subsets exceed the cap of " + std::to_string(cap)),
      subsets_(subsets) {}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const std::uint64_t factor = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t reduced = result / g;
    const std::uint64_t divisor = i / g;
    const std::uint64_t f = factor / divisor;
    if (f != 0 && reduced > kMax / f) return kMax;
    result = reduced * f;
  }
  return result;
}

SolverReport betweenness_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                                const InterdictionPlan& plan_template, std::size_t budget,
                                const SolverOptions& options) {
  const auto start = Clock::now();
  const std::vector<EdgeId> candidates = candidate_edges(graph, plan_template);
  check_inputs(graph, specs, plan_template, budget, candidates.size());

  SolverReport report;
  report.solver = "betweenness";
  InterdictionPlan plan = extendable_plan(plan_template, budget);
  std::vector<bool> taken(graph.num_edges(), false);
  ++report.evaluations;
  record(report, evaluate_plan(graph, specs, plan, options.solve), start);
  for (std::size_t round = 0; round < budget; ++round) {
    const CentralityField field = centrality(graph, specs, plan);
    EdgeId best = kNoEdge;
    double best_score = -1.0;
    for (EdgeId id : candidates) {
      if (taken[static_cast<std::size_t>(id)]) continue;
      if (field.score[static_cast<std::size_t>(id)] > best_score) {
        best = id;
        best_score = field.score[static_cast<std::size_t>(id)];
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    plan.interdict(best);
    report.chosen.push_back(best);
    ++report.evaluations;
    record(report, evaluate_plan(graph, specs, plan, options.solve), start);
  }
  report.wall_time = seconds_since(start);
  return report;
}

SolverReport greedy_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan_template, std::size_t budget,
                           const SolverOptions& options) {
  const auto start = Clock::now();
  const std::vector<EdgeId> candidates = candidate_edges(graph, plan_template);
  check_inputs(graph, specs, plan_template, budget, candidates.size());

  SolverReport report;
  report.solver = options.require_positive_gain ? "greedy-positive" : "greedy";
  InterdictionPlan plan = extendable_plan(plan_template, budget);
  double current = evaluate_plan(graph, specs, plan, options.solve);
  ++report.evaluations;
  record(report, current, start);

  std::vector<EdgeId> remaining = candidates;
  for (std::size_t round = 0; round < budget; ++round) {
    const std::vector<double> values =
        parallel_map(remaining.size(), options.threads, [&](std::size_t i) {
          InterdictionPlan trial = plan;
          trial.interdict(remaining[i]);
          return evaluate_plan(graph, specs, trial, options.solve);
        });
    report.evaluations += remaining.size();
    // remaining is sorted by edge id, so the first maximum is the lowest id.
    const auto best = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    if (options.require_positive_gain && !(values[best] - current > 0.0)) break;
    plan.interdict(remaining[best]);
    report.chosen.push_back(remaining[best]);
    current = values[best];
    record(report, current, start);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  report.wall_time = seconds_since(start);
  return report;
}

SolverReport exhaustive_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                               const InterdictionPlan& plan_template, std::size_t budget,
                               const SolverOptions& options) {
  const auto start = Clock::now();
  const std::vector<EdgeId> candidates = candidate_edges(graph, plan_template);
  check_inputs(graph, specs, plan_template, budget, candidates.size());
  const std::uint64_t subsets = binomial(candidates.size(), budget);
  if (subsets > options.max_subsets) throw EnumerationCapError(subsets, options.max_subsets);

  SolverReport report;
  report.solver = "exhaustive";
  const InterdictionPlan base = extendable_plan(plan_template, budget);

  // Lexicographic enumeration of index combinations, evaluated in batches.
  constexpr std::size_t kBatch = 1024;
  std::vector<std::size_t> combo(budget);
  for (std::size_t i = 0; i < budget; ++i) combo[i] = i;
  bool more = true;
  auto advance = [&] {
    const std::size_t n = candidates.size();
    std::size_t i = budget;
    while (i > 0 && combo[i - 1] == n - budget + (i - 1)) --i;
    if (i == 0) {
      more = false;
      return;
    }
    ++combo[i - 1];
    for (std::size_t j = i; j < budget; ++j) combo[j] = combo[j - 1] + 1;
  };

  std::vector<std::size_t> best_combo;
  double best_value = -kInfinity;
  std::vector<std::vector<std::size_t>> batch;
  while (more) {
    batch.clear();
    while (more && batch.size() < kBatch) {
      batch.push_back(combo);
      if (budget == 0) more = false;
      else advance();
    }
    const std::vector<double> values =
        parallel_map(batch.size(), options.threads, [&](std::size_t b) {
          InterdictionPlan trial = base;
          for (std::size_t idx : batch[b]) trial.interdict(candidates[idx]);
          return evaluate_plan(graph, specs, trial, options.solve);
        });
    report.evaluations += batch.size();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (values[b] > best_value) {
        best_value = values[b];
        best_combo = batch[b];
      }
    }
  }
  for (std::size_t idx : best_combo) report.chosen.push_back(candidates[idx]);
  fill_prefix_trajectory(report, graph, specs, base, options, start);
  report.wall_time = seconds_since(start);
  return report;
}

SolverReport random_solver(const Graph& graph, std::span<const EvaderSpec> specs,
                           const InterdictionPlan& plan_template, std::size_t budget,
                           std::uint64_t seed, const SolverOptions& options) {
  const auto start = Clock::now();
  std::vector<EdgeId> candidates = candidate_edges(graph, plan_template);
  check_inputs(graph, specs, plan_template, budget, candidates.size());

  SolverReport report;
  report.solver = "random";
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  report.chosen.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(budget));
  fill_prefix_trajectory(report, graph, specs, extendable_plan(plan_template, budget), options,
                         start);
  report.wall_time = seconds_since(start);
  return report;
}

}  // namespace interdict
