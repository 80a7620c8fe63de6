#include "interdict/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "interdict/instances.hpp"
#include "interdict/oracles.hpp"

namespace interdict {

namespace {

std::vector<EvaderSpec> at_lambda(const std::vector<EvaderSpec>& specs, double lambda) {
  std::vector<EvaderSpec> out = specs;
  for (EvaderSpec& spec : out) spec.model = with_lambda(spec.model, lambda);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double csv_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("malformed CSV number `" + s + "`");
  return v;
}

}  // namespace

std::vector<LambdaSweepRow> run_lambda_sweep(const Instance& instance,
                                             std::vector<double> lambdas,
                                             const InterdictionPlan& plan,
                                             const SolveOptions& solve) {
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<LambdaSweepRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const std::vector<EvaderSpec> specs = at_lambda(instance.evaders, lambda);
    validate_scenario(instance.graph, specs);
    LambdaSweepRow row;
    row.lambda = lambda;
    for (const EvaderSpec& spec : specs) {
      const AbsorbingChain chain = build_chain(instance.graph, spec, plan);
      const double cost = expected_cost(chain, spec.sources, solve).expected_cost;
      row.evader_cost.push_back(cost);
      row.objective += spec.weight * cost;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LambdaSweepRow> run_lambda_sweep(const ExperimentConfig& config) {
  if (config.lambdas.empty()) throw ConfigError("lambda sweep needs `lambdas`");
  const Instance instance = materialize(config);
  return run_lambda_sweep(instance, config.lambdas, empty_plan(config));
}

double weighted_shortest_path_cost(const Instance& instance, const InterdictionPlan& plan) {
  double total = 0.0;
  for (const EvaderSpec& spec : instance.evaders) {
    const DistanceField field = distances_to_target(instance.graph, spec.target, plan);
    double expected = 0.0;
    for (const SourceWeight& s : spec.sources) {
      expected += s.prob * field.dist[static_cast<std::size_t>(s.node)];
    }
    total += spec.weight * expected;
  }
  return total;
}

std::vector<BudgetSweepRow> run_budget_sweep(const Instance& instance,
                                             const InterdictionPlan& plan_template,
                                             const BudgetSweepOptions& options) {
  std::vector<std::size_t> budgets = options.budgets;
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  if (budgets.empty()) throw ConfigError("budget sweep needs `budgets`");
  if (options.lambdas.empty()) throw ConfigError("budget sweep needs `lambdas`");
  if (options.solvers.empty()) throw ConfigError("budget sweep needs `solvers`");
  const std::size_t max_budget = budgets.back();

  std::vector<BudgetSweepRow> rows;
  for (double lambda : options.lambdas) {
    const std::vector<EvaderSpec> specs = at_lambda(instance.evaders, lambda);
    for (const std::string& solver : options.solvers) {
      if (solver == "exhaustive") {
        for (std::size_t b : budgets) {
          try {
            const SolverReport r =
                exhaustive_solver(instance.graph, specs, plan_template, b, options.solver);
            rows.push_back({solver, lambda, b, r.final_objective(), r.wall_time, r.evaluations});
          } catch (const EnumerationCapError& e) {
            std::cerr << "skipping exhaustive at budget " << b << ": " << e.what() << '\n';
          }
        }
        continue;
      }
      SolverReport report;
      SolverOptions opts = options.solver;
      if (solver == "greedy" || solver == "greedy-positive") {
        opts.require_positive_gain = solver == "greedy-positive";
        report = greedy_solver(instance.graph, specs, plan_template, max_budget, opts);
      } else if (solver == "betweenness") {
        report = betweenness_solver(instance.graph, specs, plan_template, max_budget, opts);
      } else if (solver == "random") {
        report = random_solver(instance.graph, specs, plan_template, max_budget, options.seed,
                               opts);
      } else {
        throw ConfigError("unknown solver `" + solver + "`");
      }
      for (std::size_t b : budgets) {
        BudgetSweepRow row{solver, lambda, b, report.final_objective(), report.wall_time,
                           report.evaluations};
        // A positive-gain greedy run may stop early; later budgets keep its
        // final set.
        if (b < report.objective_trajectory.size()) {
          row.objective = report.objective_trajectory[b];
          row.wall_time = report.elapsed[b];
          row.evaluations = report.evaluations_at[b];
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<BudgetSweepRow> run_budget_sweep(const ExperimentConfig& config) {
  const Instance instance = materialize(config);
  BudgetSweepOptions options;
  options.solvers = config.solvers;
  options.lambdas = config.lambdas;
  options.budgets = config.budgets;
  options.seed = config.seed.value_or(0);
  options.solver.threads = config.threads;
  options.solver.max_subsets = config.max_subsets;
  return run_budget_sweep(instance, empty_plan(config), options);
}

std::optional<GreedyDecrease> search_greedy_decrease(const ExperimentConfig& config,
                                                     double lambda, std::uint64_t first_seed,
                                                     std::size_t max_seeds) {
  ExperimentConfig trial = config;
  for (std::size_t k = 0; k < max_seeds; ++k) {
    trial.seed = first_seed + k;
    const Instance instance = materialize(trial);
    const std::vector<EvaderSpec> specs = at_lambda(instance.evaders, lambda);
    const std::vector<std::size_t> budgets = trial.sorted_budgets();
    const std::size_t budget =
        budgets.empty() ? interdictable_edges(instance.graph).size() : budgets.back();
    SolverOptions opts;
    opts.threads = trial.threads;
    const SolverReport report =
        greedy_solver(instance.graph, specs, empty_plan(trial), budget, opts);
    const auto& traj = report.objective_trajectory;
    for (std::size_t b = 1; b < traj.size(); ++b) {
      if (traj[b] < traj[b - 1]) return GreedyDecrease{*trial.seed, b, traj[b - 1], traj[b]};
    }
  }
  return std::nullopt;
}

void write_lambda_sweep_csv(std::ostream& out, const std::vector<LambdaSweepRow>& rows) {
  const std::size_t evaders = rows.empty() ? 0 : rows.front().evader_cost.size();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "lambda";
  for (std::size_t k = 0; k < evaders; ++k) out << ",evader_" << k;
  out << ",objective\n";
  for (const LambdaSweepRow& row : rows) {
    out << row.lambda;
    for (double c : row.evader_cost) out << ',' << c;
    out << ',' << row.objective << '\n';
  }
  out.precision(old_precision);
}

void write_budget_sweep_csv(std::ostream& out, const std::vector<BudgetSweepRow>& rows) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "solver,lambda,budget,objective,wall_time,evaluations\n";
  for (const BudgetSweepRow& row : rows) {
    out << row.solver << ',' << row.lambda << ',' << row.budget << ',' << row.objective << ','
        << row.wall_time << ',' << row.evaluations << '\n';
  }
  out.precision(old_precision);
}

std::vector<LambdaSweepRow> read_lambda_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty lambda sweep CSV");
  const auto header = split_csv(line);
  if (header.size() < 2 || header.front() != "lambda" || header.back() != "objective") {
    throw std::invalid_argument("unexpected lambda sweep header");
  }
  for (std::size_t k = 1; k + 1 < header.size(); ++k) {
    if (header[k] != "evader_" + std::to_string(k - 1)) {
      throw std::invalid_argument("unexpected lambda sweep column " + header[k]);
    }
  }
  std::vector<LambdaSweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) throw std::invalid_argument("ragged lambda sweep row");
    LambdaSweepRow row;
    row.lambda = csv_double(fields.front());
    for (std::size_t k = 1; k + 1 < fields.size(); ++k) {
      row.evader_cost.push_back(csv_double(fields[k]));
    }
    row.objective = csv_double(fields.back());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BudgetSweepRow> read_budget_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty budget sweep CSV");
  if (line != "solver,lambda,budget,objective,wall_time,evaluations") {
    throw std::invalid_argument("unexpected budget sweep header");
  }
  std::vector<BudgetSweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw std::invalid_argument("budget sweep row needs 6 fields");
    rows.push_back({f[0], csv_double(f[1]), static_cast<std::size_t>(std::stoull(f[2])),
                    csv_double(f[3]), csv_double(f[4]),
                    static_cast<std::uint64_t>(std::stoull(f[5]))});
  }
  return rows;
}

nlohmann::json run_fig1_demo(double lambda, double delta) {
  using nlohmann::json;
  const Fig1Instance fig = gen_fig1_instance(lambda);
  const Graph& graph = fig.graph;
  const NodeId source = fig.evader.sources.front().node;
  const NodeId target = fig.evader.target;

  json uniform;
  uniform["baseline"] = oracle_expected_cost(uniform_simple_paths(graph, source, target));
  json removed = json::array();
  for (EdgeId id : interdictable_edges(graph)) {
    const EdgeId drop[] = {id};
    const Graph reduced = graph.without_edges(drop);
    const double cost = oracle_expected_cost(uniform_simple_paths(reduced, source, target));
    removed.push_back({{"tail", graph.edge(id).tail},
                       {"head", graph.edge(id).head},
                       {"expected_cost", cost}});
  }
  uniform["removed"] = removed;

  const std::vector<EvaderSpec> specs = {fig.evader};
  const InterdictionPlan plan(delta);
  json markov;
  markov["lambda"] = lambda;
  markov["delta"] = delta;
  markov["baseline"] = evaluate_plan(graph, specs, plan);
  json candidates = json::array();
  for (EdgeId id : interdictable_edges(graph)) {
    InterdictionPlan trial = plan;
    trial.interdict(id);
    candidates.push_back({{"tail", graph.edge(id).tail},
                          {"head", graph.edge(id).head},
                          {"objective", evaluate_plan(graph, specs, trial)}});
  }
  markov["candidates"] = candidates;
  const SolverReport best = exhaustive_solver(graph, specs, plan, 1);
  const Edge& pick = graph.edge(best.chosen.front());
  markov["best"] = {{"tail", pick.tail}, {"head", pick.head}, {"objective", best.final_objective()}};

  return {{"uniform_routes", uniform}, {"markov", markov}};
}

nlohmann::json to_json(const SolverReport& report, const Graph& graph) {
  nlohmann::json chosen = nlohmann::json::array();
  for (EdgeId id : report.chosen) chosen.push_back({graph.edge(id).tail, graph.edge(id).head});
  return {{"solver", report.solver},
          {"chosen", chosen},
          {"objective_trajectory", report.objective_trajectory},
          {"elapsed", report.elapsed},
          {"evaluations", report.evaluations},
          {"wall_time", report.wall_time}};
}

nlohmann::json to_json(const EvalResult& result, const AbsorbingChain& chain) {
  nlohmann::json visits = nlohmann::json::array();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (result.visit_vector[i] == 0.0) continue;
    visits.push_back({{"node", chain.ordering()[i]}, {"visits", result.visit_vector[i]}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const EdgeVisit& v : result.edge_visits) {
    if (v.visits == 0.0) continue;
    edges.push_back({{"tail", v.tail}, {"head", v.head}, {"visits", v.visits}});
  }
  return {{"expected_cost", result.expected_cost}, {"node_visits", visits}, {"edge_visits", edges}};
}

}  // namespace interdict
