#ifndef INTERDICT_EXPERIMENT_HPP_
#define INTERDICT_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "interdict/chain_eval.hpp"
#include "interdict/config.hpp"
#include "interdict/interdiction.hpp"

namespace interdict {

struct LambdaSweepRow {
  double lambda = 0.0;
  std::vector<double> evader_cost;  // E_k[c] per evader
  double objective = 0.0;
};

/// Expected costs under `plan` for every lambda, rows sorted by lambda.
std::vector<LambdaSweepRow> run_lambda_sweep(const Instance& instance,
                                             std::vector<double> lambdas,
                                             const InterdictionPlan& plan,
                                             const SolveOptions& solve = {});

/// Sweep over config.lambdas on the configured instance with no interdiction.
std::vector<LambdaSweepRow> run_lambda_sweep(const ExperimentConfig& config);

/// Least-cost distance averaged over each evader's sources, then over
/// evaders by weight: the large-lambda limit of the objective.
double weighted_shortest_path_cost(const Instance& instance, const InterdictionPlan& plan);

struct BudgetSweepRow {
  std::string solver;
  double lambda = 0.0;
  std::size_t budget = 0;
  double objective = 0.0;
  double wall_time = 0.0;
  std::uint64_t evaluations = 0;
};

struct BudgetSweepOptions {
  std::vector<std::string> solvers;
  std::vector<double> lambdas;
  std::vector<std::size_t> budgets;
  std::uint64_t seed = 0;  // random solver
  SolverOptions solver;
};

/// One row per (solver, lambda, budget). Greedy, betweenness and random are
/// run once at the largest budget and read off at each budget (their picks
/// at budget b are the first b picks of any larger run); exhaustive runs per
/// budget and skips budgets over its subset cap.
std::vector<BudgetSweepRow> run_budget_sweep(const Instance& instance,
                                             const InterdictionPlan& plan_template,
                                             const BudgetSweepOptions& options);

std::vector<BudgetSweepRow> run_budget_sweep(const ExperimentConfig& config);

/// A greedy run whose objective went down at some pick.
struct GreedyDecrease {
  std::uint64_t seed = 0;
  std::size_t budget = 0;  // objective(budget) < objective(budget - 1)
  double before = 0.0;
  double after = 0.0;
};

/// Tries seeds first_seed, first_seed + 1, ... (at most max_seeds of them) on
/// the config's generated instance, running plain greedy at `lambda` up to
/// the largest configured budget (every interdictable edge when none is
/// configured). Returns the first decreasing step found.
std::optional<GreedyDecrease> search_greedy_decrease(const ExperimentConfig& config,
                                                     double lambda, std::uint64_t first_seed,
                                                     std::size_t max_seeds);

// CSV schemas (header line first):
//   lambda sweep: lambda,evader_0,...,evader_{k-1},objective
//   budget sweep: solver,lambda,budget,objective,wall_time,evaluations
void write_lambda_sweep_csv(std::ostream& out, const std::vector<LambdaSweepRow>& rows);
void write_budget_sweep_csv(std::ostream& out, const std::vector<BudgetSweepRow>& rows);
std::vector<LambdaSweepRow> read_lambda_sweep_csv(std::istream& in);
std::vector<BudgetSweepRow> read_budget_sweep_csv(std::istream& in);

/// Six-node example report: uniform-route costs after removing single
/// edges, and the best single interdiction for a least-cost evader with the
/// given lambda and increment.
nlohmann::json run_fig1_demo(double lambda, double delta);

nlohmann::json to_json(const SolverReport& report, const Graph& graph);
nlohmann::json to_json(const EvalResult& result, const AbsorbingChain& chain);

}  // namespace interdict

#endif  // INTERDICT_EXPERIMENT_HPP_
