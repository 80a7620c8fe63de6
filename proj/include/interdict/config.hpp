#ifndef INTERDICT_CONFIG_HPP_
#define INTERDICT_CONFIG_HPP_

// Text formats for scenarios and experiment configurations. Both are line
// based, `#` starts a comment, and unknown keys are errors. See
// docs/formats.md for the grammar.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interdict/evader.hpp"
#include "interdict/graph.hpp"
#include "interdict/instances.hpp"

namespace interdict {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a scenario: a sequence of `evader ... end` blocks.
std::vector<EvaderSpec> parse_scenario(std::istream& in);
std::vector<EvaderSpec> parse_scenario_file(const std::string& path);
void write_scenario(std::ostream& out, const std::vector<EvaderSpec>& specs);

struct GridParams {
  int rows = 10;
  int cols = 10;
  int shortcuts = 10;
  WeightRange weights;
};

struct ExperimentConfig {
  // Instance: an edge-list file, or the seeded grid generator.
  std::optional<std::string> graph_file;
  GridParams grid;
  std::optional<std::uint64_t> seed;

  // Evaders: explicit blocks, or random placement (needs the seed).
  std::vector<EvaderSpec> evaders;
  int random_targets = 0;
  int random_sources = 0;
  std::string random_model = "least-cost";
  double random_lambda = 1.0;

  std::vector<double> lambdas;
  std::vector<std::size_t> budgets;
  double delta = 4.5;
  std::optional<double> evasion_factor;
  std::vector<std::string> solvers;
  std::vector<std::pair<NodeId, NodeId>> interdict;  // plan for `eval`
  unsigned threads = 1;
  std::uint64_t max_subsets = 1'000'000;
  std::optional<std::string> out_dir;  // stdout when unset

  /// Budgets sorted, duplicates removed.
  std::vector<std::size_t> sorted_budgets() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// A graph plus its evaders, ready for evaluation.
struct Instance {
  Graph graph;
  std::vector<EvaderSpec> evaders;
};

/// Loads or generates the graph and the evaders, then checks the config
/// against them: lambdas nonnegative, budgets within the interdictable edge
/// count, scenario weights summing to one.
Instance materialize(const ExperimentConfig& config);

/// Plan with the config's delta and evasion factor and no edges.
InterdictionPlan empty_plan(const ExperimentConfig& config);

/// Plan holding the config's `interdict` edges.
InterdictionPlan configured_plan(const ExperimentConfig& config, const Graph& graph);

}  // namespace interdict

#endif  // INTERDICT_CONFIG_HPP_
