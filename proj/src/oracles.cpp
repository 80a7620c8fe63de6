#include "interdict/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>

namespace interdict {

PathCapError::PathCapError(std::size_t cap)
    : std::runtime_error("path enumeration exceeded " + std::to_string(cap) + " paths"),
      cap_(cap) {}

bool is_acyclic(const AbsorbingChain& chain) {
  const std::size_t m = chain.size();
  std::vector<int> indegree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (const Transition& t : chain.row(i)) {
      if (t.to != AbsorbingChain::kAbsorbed) ++indegree[static_cast<std::size_t>(t.to)];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < m; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.back();
    ready.pop_back();
    ++visited;
    for (const Transition& t : chain.row(u)) {
      if (t.to == AbsorbingChain::kAbsorbed) continue;
      if (--indegree[static_cast<std::size_t>(t.to)] == 0) {
        ready.push_back(static_cast<std::size_t>(t.to));
      }
    }
  }
  return visited == m;
}

PathEnsemble enumerate_paths(const AbsorbingChain& chain, std::span<const double> start,
                             const EnumerationOptions& options) {
  if (start.size() != chain.size()) {
    throw std::invalid_argument("start vector does not match the chain");
  }
  const bool prune = !is_acyclic(chain);
  PathEnsemble ensemble;

  struct Frame {
    std::size_t state;
    std::size_t next;  // next transition to expand
    double prob;
    double cost;
  };
  std::vector<Frame> stack;
  std::vector<NodeId> nodes;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    if (start[s] <= 0.0) continue;
    stack.push_back({s, 0, start[s], 0.0});
    nodes.assign(1, chain.ordering()[s]);
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto row = chain.row(top.state);
      if (top.next == row.size()) {
        stack.pop_back();
        nodes.pop_back();
        continue;
      }
      const Transition& t = row[top.next++];
      const double prob = top.prob * t.prob;
      const double cost = top.cost + t.cost;
      if (t.to == AbsorbingChain::kAbsorbed) {
        if (ensemble.paths.size() >= options.max_paths) throw PathCapError(options.max_paths);
        WeightedPath path{nodes, prob, cost};
        path.nodes.push_back(chain.target());
        ensemble.total_mass += prob;
        ensemble.paths.push_back(std::move(path));
        continue;
      }
      if (prune && prob < options.mass_floor) continue;
      stack.push_back({static_cast<std::size_t>(t.to), 0, prob, cost});
      nodes.push_back(chain.ordering()[static_cast<std::size_t>(t.to)]);
    }
  }
  return ensemble;
}

PathEnsemble uniform_simple_paths(const Graph& graph, NodeId source, NodeId target,
                                  std::size_t max_paths) {
  if (!graph.has_node(source) || !graph.has_node(target)) {
    throw GraphError("path endpoints outside the graph");
  }
  PathEnsemble ensemble;
  std::vector<bool> on_path(static_cast<std::size_t>(graph.num_nodes()), false);
  std::vector<NodeId> nodes{source};
  on_path[static_cast<std::size_t>(source)] = true;

  // Depth-first over (node, position in its out-edge list).
  std::vector<std::pair<NodeId, std::size_t>> stack{{source, 0}};
  std::vector<double> cost{0.0};
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    const auto out = graph.out_edges(u);
    if (u == target || next == out.size()) {
      if (u == target) {
        if (ensemble.paths.size() >= max_paths) throw PathCapError(max_paths);
        ensemble.paths.push_back({nodes, 0.0, cost.back()});
      }
      on_path[static_cast<std::size_t>(u)] = false;
      stack.pop_back();
      nodes.pop_back();
      cost.pop_back();
      continue;
    }
    const Edge& e = graph.edge(out[next++]);
    if (on_path[static_cast<std::size_t>(e.head)]) continue;
    on_path[static_cast<std::size_t>(e.head)] = true;
    nodes.push_back(e.head);
    cost.push_back(cost.back() + e.cost);
    stack.emplace_back(e.head, 0);
  }
  if (!ensemble.paths.empty()) {
    const double p = 1.0 / static_cast<double>(ensemble.paths.size());
    for (auto& path : ensemble.paths) path.probability = p;
    ensemble.total_mass = 1.0;
  }
  return ensemble;
}

double oracle_expected_cost(const PathEnsemble& ensemble, bool renormalize) {
  if (ensemble.paths.empty()) throw std::invalid_argument("empty path ensemble");
  double total = 0.0;
  double mass = 0.0;
  for (const WeightedPath& p : ensemble.paths) {
    total += p.probability * p.cost;
    mass += p.probability;
  }
  return renormalize ? total / mass : total;
}

namespace {

struct ShardTotals {
  double cost_sum = 0.0;
  double cost_sq_sum = 0.0;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;
  std::vector<double> visit_sum;
  std::vector<double> visit_sq_sum;
};

ShardTotals run_shard(const AbsorbingChain& chain, std::span<const double> start,
                      std::span<const double> cumulative, std::span<const std::size_t> offsets,
                      std::uint64_t walks, std::uint64_t seed, unsigned shard,
                      std::size_t step_cap) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard)};
  std::mt19937_64 rng(seq);
  std::discrete_distribution<std::size_t> pick_start(start.begin(), start.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ShardTotals totals;
  totals.visit_sum.assign(cumulative.size(), 0.0);
  totals.visit_sq_sum.assign(cumulative.size(), 0.0);
  std::vector<std::uint32_t> counts(cumulative.size(), 0);
  std::vector<std::size_t> touched;

  for (std::uint64_t w = 0; w < walks; ++w) {
    std::size_t state = pick_start(rng);
    double cost = 0.0;
    bool absorbed = false;
    touched.clear();
    for (std::size_t step = 0; step < step_cap; ++step) {
      const auto row = chain.row(state);
      const std::size_t base = offsets[state];
      const double u = unit(rng);
      auto first = cumulative.begin() + static_cast<std::ptrdiff_t>(base);
      auto last = first + static_cast<std::ptrdiff_t>(row.size());
      auto it = std::upper_bound(first, last, u);
      if (it == last) --it;  // u beyond the rounded row total
      const auto k = static_cast<std::size_t>(it - first);
      const std::size_t slot = base + k;
      if (counts[slot]++ == 0) touched.push_back(slot);
      cost += row[k].cost;
      if (row[k].to == AbsorbingChain::kAbsorbed) {
        absorbed = true;
        break;
      }
      state = static_cast<std::size_t>(row[k].to);
    }
    if (absorbed) {
      ++totals.completed;
      totals.cost_sum += cost;
      totals.cost_sq_sum += cost * cost;
      for (std::size_t slot : touched) {
        const double c = counts[slot];
        totals.visit_sum[slot] += c;
        totals.visit_sq_sum[slot] += c * c;
      }
    } else {
      ++totals.censored;
    }
    for (std::size_t slot : touched) counts[slot] = 0;
  }
  return totals;
}

double std_error(double sum, double sq_sum, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double var = std::max(0.0, (sq_sum - sum * sum / nn) / (nn - 1.0));
  return std::sqrt(var / nn);
}

}  // namespace

WalkStats simulate_walks(const AbsorbingChain& chain, std::span<const double> start,
                         const WalkOptions& options) {
  if (options.walks < 1) throw std::invalid_argument("at least one walk is required");
  if (start.size() != chain.size()) {
    throw std::invalid_argument("start vector does not match the chain");
  }
  double start_mass = 0.0;
  for (double a : start) {
    if (!(a >= 0.0)) throw std::invalid_argument("start vector entries must be nonnegative");
    start_mass += a;
  }
  if (!(start_mass > 0.0)) throw std::invalid_argument("start vector has no mass");

  std::vector<std::size_t> offsets(chain.size() + 1, 0);
  std::vector<double> cumulative;
  cumulative.reserve(chain.num_transitions());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    double acc = 0.0;
    for (const Transition& t : chain.row(i)) {
      acc += t.prob;
      cumulative.push_back(acc);
    }
    offsets[i + 1] = cumulative.size();
  }
  const std::size_t step_cap =
      options.step_cap > 0 ? options.step_cap : 100 * (chain.size() + 1);

  const unsigned shards = std::max(1u, options.shards);
  std::vector<ShardTotals> parts(shards);
  std::vector<std::exception_ptr> errors(shards);
  auto work = [&](unsigned s) {
    try {
      const std::uint64_t walks =
          options.walks / shards + (s < options.walks % shards ? 1 : 0);
      parts[s] = run_shard(chain, start, cumulative, offsets, walks, options.seed, s, step_cap);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ShardTotals merged;
  merged.visit_sum.assign(cumulative.size(), 0.0);
  merged.visit_sq_sum.assign(cumulative.size(), 0.0);
  for (const ShardTotals& p : parts) {
    merged.cost_sum += p.cost_sum;
    merged.cost_sq_sum += p.cost_sq_sum;
    merged.completed += p.completed;
    merged.censored += p.censored;
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
      merged.visit_sum[k] += p.visit_sum[k];
      merged.visit_sq_sum[k] += p.visit_sq_sum[k];
    }
  }
  if (merged.completed == 0) {
    throw ModelError("every walk hit the step cap; the target may be inaccessible");
  }

  WalkStats stats;
  const double n = static_cast<double>(merged.completed);
  stats.completed = merged.completed;
  stats.censored = merged.censored;
  stats.mean_cost = merged.cost_sum / n;
  stats.std_error = std_error(merged.cost_sum, merged.cost_sq_sum, merged.completed);
  stats.edge_visits.reserve(cumulative.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto row = chain.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::size_t slot = offsets[i] + k;
      const NodeId head = row[k].to == AbsorbingChain::kAbsorbed
                              ? chain.target()
                              : chain.ordering()[static_cast<std::size_t>(row[k].to)];
      stats.edge_visits.push_back(
          {chain.ordering()[i], head, row[k].edge, merged.visit_sum[slot] / n,
           std_error(merged.visit_sum[slot], merged.visit_sq_sum[slot], merged.completed)});
    }
  }
  return stats;
}

}  // namespace interdict
