#include "interdict/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace interdict {

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

// Tokenized non-empty lines with comments stripped.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(Line& line) {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
      std::istringstream fields(text);
      line.tokens.clear();
      for (std::string tok; fields >> tok;) line.tokens.push_back(tok);
      if (!line.tokens.empty()) {
        line.number = number_;
        return true;
      }
    }
    return false;
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line.number) + ": " + what);
}

void expect_args(const Line& line, std::size_t count) {
  if (line.tokens.size() != count + 1) {
    fail(line, "`" + line.tokens[0] + "` takes " + std::to_string(count) + " value(s)");
  }
}

double to_double(const Line& line, const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(line, "expected a number, got `" + tok + "`");
}

long long to_int(const Line& line, const std::string& tok) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(line, "expected an integer, got `" + tok + "`");
}

std::size_t to_count(const Line& line, const std::string& tok) {
  const long long v = to_int(line, tok);
  if (v < 0) fail(line, "expected a nonnegative integer, got `" + tok + "`");
  return static_cast<std::size_t>(v);
}

NodeId to_node(const Line& line, const std::string& tok) {
  const long long v = to_int(line, tok);
  if (v < 0 || v > std::numeric_limits<NodeId>::max()) fail(line, "node index out of range");
  return static_cast<NodeId>(v);
}

// Body of an `evader` block, up to and including `end`.
EvaderSpec parse_evader_block(LineReader& reader, const Line& opening) {
  EvaderSpec spec;
  std::optional<NodeId> target;
  std::string model = "least-cost";
  double lambda = 1.0;
  Line line;
  while (reader.next(line)) {
    const std::string& key = line.tokens[0];
    if (key == "end") {
      expect_args(line, 0);
      if (!target) fail(line, "evader block without `target`");
      if (spec.sources.empty()) fail(line, "evader block without `source` lines");
      spec.target = *target;
      try {
        spec.model = parse_model(model, lambda);
      } catch (const ModelError& e) {
        fail(line, e.what());
      }
      return spec;
    }
    if (key == "target") {
      expect_args(line, 1);
      target = to_node(line, line.tokens[1]);
    } else if (key == "model") {
      expect_args(line, 1);
      model = line.tokens[1];
    } else if (key == "lambda") {
      expect_args(line, 1);
      lambda = to_double(line, line.tokens[1]);
    } else if (key == "weight") {
      expect_args(line, 1);
      spec.weight = to_double(line, line.tokens[1]);
    } else if (key == "source") {
      expect_args(line, 2);
      spec.sources.push_back({to_node(line, line.tokens[1]), to_double(line, line.tokens[2])});
    } else {
      fail(line, "unknown key `" + key + "` in evader block");
    }
  }
  fail(opening, "evader block is not closed with `end`");
}

void write_double(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << "inf";
  } else {
    out << v;
  }
}

}  // namespace

std::vector<EvaderSpec> parse_scenario(std::istream& in) {
  LineReader reader(in);
  std::vector<EvaderSpec> specs;
  Line line;
  while (reader.next(line)) {
    if (line.tokens[0] != "evader") fail(line, "expected `evader`, got `" + line.tokens[0] + "`");
    expect_args(line, 0);
    specs.push_back(parse_evader_block(reader, line));
  }
  if (specs.empty()) throw ConfigError("scenario has no evader blocks");
  return specs;
}

std::vector<EvaderSpec> parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  return parse_scenario(in);
}

void write_scenario(std::ostream& out, const std::vector<EvaderSpec>& specs) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const EvaderSpec& spec : specs) {
    out << "evader\n  target " << spec.target << "\n  model " << model_name(spec.model)
        << "\n  lambda ";
    write_double(out, model_lambda(spec.model));
    out << "\n  weight " << spec.weight << '\n';
    for (const SourceWeight& s : spec.sources) out << "  source " << s.node << ' ' << s.prob << '\n';
    out << "end\n";
  }
  out.precision(old_precision);
}

std::vector<std::size_t> ExperimentConfig::sorted_budgets() const {
  std::vector<std::size_t> out = budgets;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  LineReader reader(in);
  ExperimentConfig config;
  Line line;
  while (reader.next(line)) {
    const std::string& key = line.tokens[0];
    const auto& tok = line.tokens;
    if (key == "evader") {
      expect_args(line, 0);
      config.evaders.push_back(parse_evader_block(reader, line));
    } else if (key == "graph_file") {
      expect_args(line, 1);
      config.graph_file = tok[1];
    } else if (key == "grid_rows") {
      expect_args(line, 1);
      config.grid.rows = static_cast<int>(to_count(line, tok[1]));
    } else if (key == "grid_cols") {
      expect_args(line, 1);
      config.grid.cols = static_cast<int>(to_count(line, tok[1]));
    } else if (key == "grid_shortcuts") {
      expect_args(line, 1);
      config.grid.shortcuts = static_cast<int>(to_count(line, tok[1]));
    } else if (key == "weight_min") {
      expect_args(line, 1);
      config.grid.weights.min = to_double(line, tok[1]);
    } else if (key == "weight_max") {
      expect_args(line, 1);
      config.grid.weights.max = to_double(line, tok[1]);
    } else if (key == "seed") {
      expect_args(line, 1);
      config.seed = static_cast<std::uint64_t>(to_count(line, tok[1]));
    } else if (key == "random_targets") {
      expect_args(line, 1);
      config.random_targets = static_cast<int>(to_count(line, tok[1]));
    } else if (key == "random_sources") {
      expect_args(line, 1);
      config.random_sources = static_cast<int>(to_count(line, tok[1]));
    } else if (key == "random_model") {
      expect_args(line, 1);
      config.random_model = tok[1];
    } else if (key == "random_lambda") {
      expect_args(line, 1);
      config.random_lambda = to_double(line, tok[1]);
    } else if (key == "lambdas") {
      if (tok.size() < 2) fail(line, "`lambdas` needs at least one value");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const double v = to_double(line, tok[i]);
        if (!(v >= 0.0)) fail(line, "lambda values must be nonnegative");
        config.lambdas.push_back(v);
      }
    } else if (key == "budgets") {
      if (tok.size() < 2) fail(line, "`budgets` needs at least one value");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        // `lo..hi` expands to every budget in the closed range.
        if (auto dots = tok[i].find(".."); dots != std::string::npos) {
          const std::size_t lo = to_count(line, tok[i].substr(0, dots));
          const std::size_t hi = to_count(line, tok[i].substr(dots + 2));
          if (hi < lo) fail(line, "empty budget range " + tok[i]);
          for (std::size_t b = lo; b <= hi; ++b) config.budgets.push_back(b);
        } else {
          config.budgets.push_back(to_count(line, tok[i]));
        }
      }
    } else if (key == "delta") {
      expect_args(line, 1);
      config.delta = to_double(line, tok[1]);
      if (!(config.delta >= 0.0) || std::isinf(config.delta)) {
        fail(line, "delta must be a finite nonnegative number");
      }
    } else if (key == "evasion_factor") {
      expect_args(line, 1);
      const double f = to_double(line, tok[1]);
      if (!(f > 0.0 && f <= 1.0)) fail(line, "evasion_factor must lie in (0, 1]");
      config.evasion_factor = f;
    } else if (key == "solvers") {
      if (tok.size() < 2) fail(line, "`solvers` needs at least one name");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        static const std::vector<std::string> kKnown = {"greedy", "greedy-positive",
                                                        "betweenness", "random", "exhaustive"};
        if (std::find(kKnown.begin(), kKnown.end(), tok[i]) == kKnown.end()) {
          fail(line, "unknown solver `" + tok[i] + "`");
        }
        config.solvers.push_back(tok[i]);
      }
    } else if (key == "interdict") {
      expect_args(line, 2);
      config.interdict.emplace_back(to_node(line, tok[1]), to_node(line, tok[2]));
    } else if (key == "threads") {
      expect_args(line, 1);
      config.threads = static_cast<unsigned>(std::max<std::size_t>(1, to_count(line, tok[1])));
    } else if (key == "max_subsets") {
      expect_args(line, 1);
      config.max_subsets = to_count(line, tok[1]);
    } else if (key == "out") {
      expect_args(line, 1);
      config.out_dir = tok[1];
    } else {
      fail(line, "unknown key `" + key + "`");
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

Instance materialize(const ExperimentConfig& config) {
  const bool needs_seed = !config.graph_file || config.random_targets > 0;
  if (needs_seed && !config.seed) throw ConfigError("`seed` is required for generated instances");

  Graph graph = config.graph_file
                    ? read_edge_list_file(*config.graph_file)
                    : gen_grid_instance(config.grid.rows, config.grid.cols, config.grid.shortcuts,
                                        config.grid.weights, *config.seed);

  std::vector<EvaderSpec> evaders = config.evaders;
  if (config.random_targets > 0) {
    if (!evaders.empty()) throw ConfigError("use either evader blocks or random placement");
    if (config.random_sources < 1) throw ConfigError("`random_sources` must be positive");
    // Offset the stream so placement does not replay the graph's draws.
    evaders = random_evaders(graph, config.random_targets, config.random_sources,
                             parse_model(config.random_model, config.random_lambda),
                             *config.seed + 0x9e3779b97f4a7c15ULL);
  }
  if (evaders.empty()) throw ConfigError("config defines no evaders");
  validate_scenario(graph, evaders);

  const std::size_t candidates = interdictable_edges(graph).size();
  for (std::size_t b : config.budgets) {
    if (b > candidates) {
      throw ConfigError("budget " + std::to_string(b) + " exceeds the " +
                        std::to_string(candidates) + " interdictable edges");
    }
  }
  return {std::move(graph), std::move(evaders)};
}

InterdictionPlan empty_plan(const ExperimentConfig& config) {
  InterdictionPlan plan(config.delta);
  plan.set_evasion_factor(config.evasion_factor);
  return plan;
}

InterdictionPlan configured_plan(const ExperimentConfig& config, const Graph& graph) {
  InterdictionPlan plan = empty_plan(config);
  for (const auto& [tail, head] : config.interdict) plan.interdict(graph.edge_id(tail, head));
  plan.validate(graph);
  return plan;
}

}  // namespace interdict
