#include "interdict/chain_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace interdict {

namespace {

// States reachable from the support of `start` along positive transitions.
std::vector<bool> reachable_from(const AbsorbingChain& chain, std::span<const double> start) {
  std::vector<bool> seen(chain.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (start[i] > 0.0) {
      seen[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (const Transition& t : chain.row(u)) {
      if (t.to == AbsorbingChain::kAbsorbed) continue;
      const auto v = static_cast<std::size_t>(t.to);
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

std::vector<bool> absorbing_states(const AbsorbingChain& chain) {
  const std::size_t m = chain.size();
  std::vector<std::vector<std::size_t>> preds(m);
  std::vector<bool> absorbs(m, false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < m; ++i) {
    for (const Transition& t : chain.row(i)) {
      if (t.to == AbsorbingChain::kAbsorbed) {
        if (!absorbs[i]) stack.push_back(i);
        absorbs[i] = true;
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
  return absorbs;
}

std::vector<double> solve_triangular(const AbsorbingChain& chain, std::span<const double> start) {
  // Transitions only go to smaller indices, so visits to state i are final
  // once every larger state has pushed its mass forward.
  std::vector<double> x(start.begin(), start.end());
  for (std::size_t i = chain.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    for (const Transition& t : chain.row(i)) {
      if (t.to != AbsorbingChain::kAbsorbed) x[static_cast<std::size_t>(t.to)] += x[i] * t.prob;
    }
  }
  return x;
}

}  // namespace

DenseBlocks to_dense(const AbsorbingChain& chain) {
  const auto m = static_cast<Eigen::Index>(chain.size());
  DenseBlocks blocks{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m),
                     Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (const Transition& t : chain.row(static_cast<std::size_t>(i))) {
      if (t.to == AbsorbingChain::kAbsorbed) {
        blocks.absorb(i) += t.prob;
        blocks.absorb_costs(i) = t.cost;
      } else {
        blocks.transient(i, t.to) += t.prob;
        blocks.transient_costs(i, t.to) = t.cost;
      }
    }
  }
  return blocks;
}

std::vector<double> solve_visit_vector(const AbsorbingChain& chain, std::span<const double> start,
                                       const SolveOptions& options) {
  const std::size_t m = chain.size();
  if (start.size() != m) {
    throw std::invalid_argument("start vector has " + std::to_string(start.size()) +
                                " entries, chain has " + std::to_string(m) + " states");
  }
  for (double a : start) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("start vector entries must be nonnegative");
    }
  }

  SolveMethod method = options.method;
  if (method == SolveMethod::kTriangular && !chain.triangular()) {
    throw std::invalid_argument("triangular solve requested on a non-triangular chain");
  }
  if (method == SolveMethod::kAuto && chain.triangular()) method = SolveMethod::kTriangular;
  if (method == SolveMethod::kTriangular) return solve_triangular(chain, start);

  const std::vector<bool> reachable = reachable_from(chain, start);
  const std::vector<bool> absorbs = absorbing_states(chain);
  std::vector<std::int64_t> local(m, -1);
  std::vector<std::size_t> states;
  for (std::size_t i = 0; i < m; ++i) {
    if (!reachable[i]) continue;
    if (!absorbs[i]) {
      throw SingularChainError("state of node " + std::to_string(chain.ordering()[i]) +
                               " is reachable but never absorbed");
    }
    local[i] = static_cast<std::int64_t>(states.size());
    states.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(states.size());
  std::vector<double> x(m, 0.0);
  if (k == 0) return x;

  Eigen::VectorXd a(k);
  for (Eigen::Index r = 0; r < k; ++r) a(r) = start[states[static_cast<std::size_t>(r)]];

  if (method == SolveMethod::kAuto) {
    method = states.size() <= options.dense_limit ? SolveMethod::kDense : SolveMethod::kSparse;
  }

  Eigen::VectorXd y;
  if (method == SolveMethod::kDense) {
    // (I - M)^T y = a^T, restricted to the reachable states.
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (const Transition& t : chain.row(states[static_cast<std::size_t>(r)])) {
        if (t.to == AbsorbingChain::kAbsorbed) continue;
        const auto c = local[static_cast<std::size_t>(t.to)];
        system(c, r) -= t.prob;
      }
    }
    y = system.partialPivLu().solve(a);
  } else if (method == SolveMethod::kSparse) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(chain.num_transitions() + states.size());
    for (Eigen::Index r = 0; r < k; ++r) {
      entries.emplace_back(r, r, 1.0);
      for (const Transition& t : chain.row(states[static_cast<std::size_t>(r)])) {
        if (t.to == AbsorbingChain::kAbsorbed) continue;
        entries.emplace_back(local[static_cast<std::size_t>(t.to)], r, -t.prob);
      }
    }
    Eigen::SparseMatrix<double> system(k, k);
    system.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) throw SingularChainError("sparse factorization failed");
    y = lu.solve(a);
  } else {
    y = a;
    Eigen::VectorXd next(k);
    std::size_t iteration = 0;
    double previous_change = 0.0;
    double change_two_back = 0.0;
    for (;; ++iteration) {
      if (iteration >= options.max_iterations) {
        throw SingularChainError("stationary iteration did not converge in " +
                                 std::to_string(options.max_iterations) + " steps");
      }
      next = a;
      for (Eigen::Index r = 0; r < k; ++r) {
        for (const Transition& t : chain.row(states[static_cast<std::size_t>(r)])) {
          if (t.to == AbsorbingChain::kAbsorbed) continue;
          next(local[static_cast<std::size_t>(t.to)]) += y(r) * t.prob;
        }
      }
      const double change = (next - y).cwiseAbs().maxCoeff();
      y.swap(next);
      // The remaining error is about change * r / (1 - r) for contraction
      // ratio r, estimated over two updates so periodic chains are covered.
      const double ratio =
          change_two_back > 0.0 ? std::sqrt(change / change_two_back) : 0.0;
      const double error = ratio < 1.0 ? change * ratio / (1.0 - ratio) : kInfinity;
      change_two_back = previous_change;
      previous_change = change;
      const double scale = options.iterative_tolerance * std::max(1.0, y.cwiseAbs().maxCoeff());
      if (change == 0.0 || (change <= scale && error <= scale)) break;
    }
  }

  for (Eigen::Index r = 0; r < k; ++r) {
    if (!std::isfinite(y(r))) throw SingularChainError("visit vector is not finite");
    // Visits are nonnegative; clamp roundoff below zero.
    x[states[static_cast<std::size_t>(r)]] = std::max(0.0, y(r));
  }
  return x;
}

EvalResult expected_cost(const AbsorbingChain& chain, std::span<const double> start,
                         const SolveOptions& options) {
  EvalResult result;
  result.visit_vector = solve_visit_vector(chain, start, options);
  result.edge_visits.reserve(chain.num_transitions());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double xi = result.visit_vector[i];
    double local = 0.0;
    for (const Transition& t : chain.row(i)) {
      local += t.prob * t.cost;
      const NodeId head = t.to == AbsorbingChain::kAbsorbed
                              ? chain.target()
                              : chain.ordering()[static_cast<std::size_t>(t.to)];
      result.edge_visits.push_back({chain.ordering()[i], head, t.edge, xi * t.prob});
    }
    result.expected_cost += xi * local;
  }
  return result;
}

EvalResult expected_cost(const AbsorbingChain& chain, std::span<const SourceWeight> sources,
                         const SolveOptions& options) {
  const std::vector<double> start = chain.start_vector(sources);
  return expected_cost(chain, start, options);
}

double scenario_objective(std::span<const AbsorbingChain> chains,
                          std::span<const EvaderSpec> specs, const SolveOptions& options) {
  if (chains.size() != specs.size()) {
    throw std::invalid_argument("one chain per evader is required");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    if (specs[k].weight == 0.0) continue;
    total += specs[k].weight * expected_cost(chains[k], specs[k].sources, options).expected_cost;
  }
  return total;
}

double evaluate_plan(const Graph& graph, std::span<const EvaderSpec> specs,
                     const InterdictionPlan& plan, const SolveOptions& options) {
  validate_scenario(graph, specs);
  const std::vector<AbsorbingChain> chains = scenario_chains(graph, specs, plan);
  return scenario_objective(chains, specs, options);
}

}  // namespace interdict
