// Command-line driver: instance generation, single evaluations, solver runs
// and the sweep experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "interdict/chain_eval.hpp"
#include "interdict/config.hpp"
#include "interdict/evader.hpp"
#include "interdict/experiment.hpp"
#include "interdict/graph.hpp"
#include "interdict/instances.hpp"
#include "interdict/interdiction.hpp"

namespace fs = std::filesystem;
using namespace interdict;

namespace {

struct CommonArgs {
  std::string config;
  std::string graph;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> delta;
  std::vector<double> lambdas;
  std::vector<std::size_t> budgets;
  std::vector<std::string> solvers;
  std::vector<NodeId> interdict;  // flattened tail/head pairs
  unsigned threads = 0;
};

void add_instance_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config file")->check(CLI::ExistingFile);
  cmd->add_option("--graph", args.graph, "Edge-list file (with --scenario)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--scenario", args.scenario, "Scenario file (with --graph)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Seed, overrides the config");
  cmd->add_option("--out", args.out, "Output directory (stdout when omitted)");
  cmd->add_option("--delta", args.delta, "Cost increment D of interdicted edges")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", args.threads, "Worker threads for candidate evaluation");
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig config;
  if (!args.config.empty()) {
    if (!args.graph.empty() || !args.scenario.empty()) {
      throw ConfigError("give either --config or --graph/--scenario");
    }
    config = parse_config_file(args.config);
  } else if (!args.graph.empty() && !args.scenario.empty()) {
    config.graph_file = args.graph;
    config.evaders = parse_scenario_file(args.scenario);
  } else {
    throw ConfigError("an instance needs --config, or both --graph and --scenario");
  }
  if (args.seed) config.seed = args.seed;
  if (args.out) config.out_dir = args.out;
  if (args.delta) config.delta = *args.delta;
  if (!args.lambdas.empty()) config.lambdas = args.lambdas;
  if (!args.budgets.empty()) config.budgets = args.budgets;
  if (!args.solvers.empty()) config.solvers = args.solvers;
  if (args.threads > 0) config.threads = args.threads;
  for (std::size_t i = 0; i + 1 < args.interdict.size(); i += 2) {
    config.interdict.emplace_back(args.interdict[i], args.interdict[i + 1]);
  }
  return config;
}

// Writes through `emit` to <dir>/<name>, or to stdout without a directory.
template <typename Emit>
void write_output(const std::optional<std::string>& dir, const std::string& name, Emit emit) {
  if (!dir) {
    emit(std::cout);
    return;
  }
  fs::create_directories(*dir);
  const fs::path path = fs::path(*dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit(out);
  std::cerr << "wrote " << path.string() << '\n';
}

void write_json(const std::optional<std::string>& dir, const std::string& name,
                const nlohmann::json& doc) {
  write_output(dir, name, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

// Evaders with lambda overridden when exactly one --lambda is given.
std::vector<EvaderSpec> evaders_for(const Instance& instance, const CommonArgs& args) {
  if (args.lambdas.size() > 1) throw ConfigError("this command takes a single --lambda");
  std::vector<EvaderSpec> specs = instance.evaders;
  if (!args.lambdas.empty()) {
    for (EvaderSpec& spec : specs) spec.model = with_lambda(spec.model, args.lambdas.front());
  }
  validate_scenario(instance.graph, specs);
  return specs;
}

int cmd_gen_grid(int rows, int cols, int shortcuts, WeightRange weights, std::uint64_t seed,
                 const std::optional<std::string>& out) {
  const Graph graph = gen_grid_instance(rows, cols, shortcuts, weights, seed);
  write_output(out, "grid.edges", [&](std::ostream& os) {
    os << "# grid " << rows << 'x' << cols << ", " << shortcuts << " shortcuts, seed " << seed
       << '\n';
    write_edge_list(os, graph);
  });
  return 0;
}

int cmd_eval(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const Instance instance = materialize(config);
  const std::vector<EvaderSpec> specs = evaders_for(instance, args);
  const InterdictionPlan plan = configured_plan(config, instance.graph);

  nlohmann::json doc;
  nlohmann::json evaders = nlohmann::json::array();
  double objective = 0.0;
  for (const EvaderSpec& spec : specs) {
    const AbsorbingChain chain = build_chain(instance.graph, spec, plan);
    const EvalResult result = expected_cost(chain, spec.sources);
    nlohmann::json entry = to_json(result, chain);
    entry["target"] = spec.target;
    entry["model"] = model_name(spec.model);
    entry["lambda"] = model_lambda(spec.model);
    entry["weight"] = spec.weight;
    evaders.push_back(std::move(entry));
    objective += spec.weight * result.expected_cost;
  }
  nlohmann::json interdicted = nlohmann::json::array();
  for (EdgeId id : plan.interdicted()) {
    interdicted.push_back({instance.graph.edge(id).tail, instance.graph.edge(id).head});
  }
  doc["delta"] = config.delta;
  doc["interdicted"] = interdicted;
  doc["objective"] = objective;
  doc["evaders"] = evaders;
  write_json(config.out_dir, "eval.json", doc);
  return 0;
}

int cmd_solve(const CommonArgs& args, const std::string& solver, std::size_t budget) {
  const ExperimentConfig config = load_config(args);
  const Instance instance = materialize(config);
  const std::vector<EvaderSpec> specs = evaders_for(instance, args);
  const InterdictionPlan plan = configured_plan(config, instance.graph);

  SolverOptions options;
  options.threads = config.threads;
  options.max_subsets = config.max_subsets;
  SolverReport report;
  if (solver == "greedy" || solver == "greedy-positive") {
    options.require_positive_gain = solver == "greedy-positive";
    report = greedy_solver(instance.graph, specs, plan, budget, options);
  } else if (solver == "betweenness") {
    report = betweenness_solver(instance.graph, specs, plan, budget, options);
  } else if (solver == "exhaustive") {
    report = exhaustive_solver(instance.graph, specs, plan, budget, options);
  } else if (solver == "random") {
    if (!config.seed) throw ConfigError("the random solver needs --seed");
    report = random_solver(instance.graph, specs, plan, budget, *config.seed, options);
  } else {
    throw ConfigError("unknown solver `" + solver + "`");
  }
  nlohmann::json doc = to_json(report, instance.graph);
  doc["budget"] = budget;
  doc["delta"] = config.delta;
  write_json(config.out_dir, "solve_" + solver + ".json", doc);
  return 0;
}

int cmd_lambda_sweep(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const std::vector<LambdaSweepRow> rows = run_lambda_sweep(config);
  write_output(config.out_dir, "lambda_sweep.csv",
               [&](std::ostream& out) { write_lambda_sweep_csv(out, rows); });
  return 0;
}

int cmd_budget_sweep(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const std::vector<BudgetSweepRow> rows = run_budget_sweep(config);
  write_output(config.out_dir, "budget_sweep.csv",
               [&](std::ostream& out) { write_budget_sweep_csv(out, rows); });
  return 0;
}

int cmd_seed_search(const CommonArgs& args, double lambda, std::size_t max_seeds) {
  const ExperimentConfig config = load_config(args);
  const std::uint64_t first = config.seed.value_or(1);
  const auto found = search_greedy_decrease(config, lambda, first, max_seeds);
  nlohmann::json doc{{"lambda", lambda}, {"first_seed", first}, {"max_seeds", max_seeds}};
  if (found) {
    doc["seed"] = found->seed;
    doc["budget"] = found->budget;
    doc["before"] = found->before;
    doc["after"] = found->after;
  } else {
    doc["seed"] = nullptr;
  }
  write_json(config.out_dir, "seed_search.json", doc);
  return found ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network interdiction against Markovian evaders"};
  app.require_subcommand(1);

  int rows = 10, cols = 10, shortcuts = 10;
  WeightRange weights;
  std::uint64_t grid_seed = 0;
  std::optional<std::string> grid_out;
  auto* gen = app.add_subcommand("gen-grid", "Generate a seeded grid instance as an edge list");
  gen->add_option("--rows", rows, "Lattice rows")->check(CLI::Range(2, 100000));
  gen->add_option("--cols", cols, "Lattice columns")->check(CLI::Range(2, 100000));
  gen->add_option("--shortcuts", shortcuts, "Random shortcut arcs")->check(CLI::NonNegativeNumber);
  gen->add_option("--weight-min", weights.min, "Smallest arc cost");
  gen->add_option("--weight-max", weights.max, "Largest arc cost");
  gen->add_option("--seed", grid_seed, "Generator seed")->required();
  gen->add_option("--out", grid_out, "Output directory (stdout when omitted)");

  double fig1_lambda = 10.0, fig1_delta = 1000.0;
  std::optional<std::string> fig1_out;
  auto* fig1 = app.add_subcommand("fig1-demo", "Six-node example: route costs and best single cut");
  fig1->add_option("--lambda", fig1_lambda, "Evader lambda")->check(CLI::NonNegativeNumber);
  fig1->add_option("--delta", fig1_delta, "Cost increment D")->check(CLI::NonNegativeNumber);
  fig1->add_option("--out", fig1_out, "Output directory (stdout when omitted)");

  CommonArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Expected cost of a scenario under a plan");
  add_instance_flags(eval, eval_args);
  eval->add_option("--lambda", eval_args.lambdas, "Lambda for every evader")->expected(1);
  eval->add_option("--interdict", eval_args.interdict, "Interdicted edge as `tail head`")
      ->expected(2)
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  CommonArgs solve_args;
  std::string solver = "greedy";
  std::size_t budget = 1;
  auto* solve = app.add_subcommand("solve", "Run one solver at one budget");
  add_instance_flags(solve, solve_args);
  solve->add_option("--solver", solver, "greedy, greedy-positive, betweenness, exhaustive, random")
      ->check(CLI::IsMember({"greedy", "greedy-positive", "betweenness", "exhaustive", "random"}));
  solve->add_option("--budget", budget, "Number of edges to interdict");
  solve->add_option("--lambda", solve_args.lambdas, "Lambda for every evader")->expected(1);
  solve->add_option("--interdict", solve_args.interdict, "Pre-interdicted edge as `tail head`")
      ->expected(2)
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  CommonArgs lsweep_args;
  auto* lsweep = app.add_subcommand("lambda-sweep", "Objective against lambda, no interdiction");
  add_instance_flags(lsweep, lsweep_args);
  lsweep->add_option("--lambda", lsweep_args.lambdas, "Lambda values, override the config");

  CommonArgs bsweep_args;
  auto* bsweep = app.add_subcommand("budget-sweep", "Solver objectives against budget and lambda");
  add_instance_flags(bsweep, bsweep_args);
  bsweep->add_option("--lambda", bsweep_args.lambdas, "Lambda values, override the config");
  bsweep->add_option("--budget", bsweep_args.budgets, "Budgets, override the config");
  bsweep->add_option("--solver", bsweep_args.solvers, "Solvers, override the config")
      ->check(CLI::IsMember({"greedy", "greedy-positive", "betweenness", "exhaustive", "random"}));

  CommonArgs search_args;
  double search_lambda = 0.1;
  std::size_t max_seeds = 50;
  auto* search = app.add_subcommand(
      "seed-search", "Find a seed where plain greedy's objective decreases at some pick");
  add_instance_flags(search, search_args);
  search->add_option("--lambda", search_lambda, "Evader lambda")->check(CLI::NonNegativeNumber);
  search->add_option("--max-seeds", max_seeds, "Seeds to try, starting at --seed (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!(weights.min >= 0.0 && weights.min <= weights.max)) {
        throw ConfigError("need 0 <= --weight-min <= --weight-max");
      }
      return cmd_gen_grid(rows, cols, shortcuts, weights, grid_seed, grid_out);
    }
    if (*fig1) {
      write_json(fig1_out, "fig1.json", run_fig1_demo(fig1_lambda, fig1_delta));
      return 0;
    }
    if (*eval) return cmd_eval(eval_args);
    if (*solve) return cmd_solve(solve_args, solver, budget);
    if (*lsweep) return cmd_lambda_sweep(lsweep_args);
    if (*bsweep) return cmd_budget_sweep(bsweep_args);
    if (*search) return cmd_seed_search(search_args, search_lambda, max_seeds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
