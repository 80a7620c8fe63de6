#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>
#include <sstream>

#include "interdict/graph.hpp"
#include "interdict/instances.hpp"
#include "interdict/tolerances.hpp"
#include "test_support.hpp"

using namespace interdict;

namespace {

Graph path_graph() {
  return Graph(3, {{0, 1, 1.0, std::nullopt}, {1, 2, 1.0, std::nullopt}});
}

// Forward Dijkstra from one source, returning the cost to `target`.
double forward_distance(const Graph& g, NodeId source, NodeId target) {
  std::vector<double> d(static_cast<std::size_t>(g.num_nodes()), kInfinity);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  d[static_cast<std::size_t>(source)] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > d[static_cast<std::size_t>(u)]) continue;
    for (EdgeId e : g.out_edges(u)) {
      const Edge& edge = g.edge(e);
      const double nd = du + edge.cost;
      if (nd < d[static_cast<std::size_t>(edge.head)]) {
        d[static_cast<std::size_t>(edge.head)] = nd;
        heap.push({nd, edge.head});
      }
    }
  }
  return d[static_cast<std::size_t>(target)];
}

}  // namespace

TEST_CASE("effective cost adds the increment only on interdicted edges") {
  const Graph g(2, {{0, 1, 1.0, std::nullopt}, {1, 1, 0.0, std::nullopt}});
  InterdictionPlan plan(4.5);
  CHECK(effective_cost(g, 0, plan) == 1.0);
  plan.interdict(0);
  CHECK(effective_cost(g, 0, plan) == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(effective_cost(g, 1, plan) == 0.0);
  CHECK_THROWS_AS(effective_cost(g, 7, plan), GraphError);

  InterdictionPlan loop_plan(4.5);
  loop_plan.interdict(1);
  CHECK_THROWS_AS(loop_plan.validate(g), GraphError);
}

TEST_CASE("per-edge increments override the default") {
  const Graph g = path_graph();
  InterdictionPlan plan(2.0);
  plan.interdict(0, 10.0);
  plan.interdict(1);
  CHECK(plan.increment(0) == 10.0);
  CHECK(plan.increment(1) == 2.0);
  CHECK(effective_costs(g, plan) == std::vector<double>{11.0, 3.0});
  CHECK_THROWS_AS(plan.interdict(0), std::invalid_argument);
  CHECK_THROWS_AS(InterdictionPlan(-1.0), std::invalid_argument);
}

TEST_CASE("plan budget caps the interdiction set") {
  InterdictionPlan plan(1.0, 1);
  plan.interdict(0);
  CHECK_THROWS_AS(plan.interdict(1), std::invalid_argument);
  CHECK(plan.size() == 1);
  CHECK(plan.size() <= plan.budget());
}

TEST_CASE("graph construction rejects malformed input") {
  CHECK_THROWS_AS(Graph(2, {{0, 1, -1.0, std::nullopt}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 0, 1.0, std::nullopt}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 1.0, std::nullopt}, {0, 1, 2.0, std::nullopt}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 2, 1.0, std::nullopt}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 1.0, 0.0}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 1.0, 1.5}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, std::nan(""), std::nullopt}}), GraphError);
  CHECK_NOTHROW(Graph(2, {{0, 0, 0.0, std::nullopt}, {0, 1, 1.0, 1.0}}));
}

TEST_CASE("adjacency lists") {
  const Graph g = gen_fig1_instance().graph;
  CHECK(g.num_nodes() == 6);
  CHECK(g.num_edges() == 8);
  CHECK(g.out_edges(0).size() == 4);
  CHECK(g.in_edges(4).size() == 3);
  CHECK(g.find_edge(4, 5).has_value());
  CHECK_FALSE(g.find_edge(5, 4).has_value());
  CHECK_THROWS_AS(g.edge_id(5, 4), GraphError);
  const EdgeId drop[] = {g.edge_id(4, 5)};
  const Graph h = g.without_edges(drop);
  CHECK(h.num_edges() == 7);
  CHECK_FALSE(h.find_edge(4, 5).has_value());
}

TEST_CASE("distances on a path") {
  const DistanceField f = distances_to_target(path_graph(), 2, InterdictionPlan{});
  CHECK(f.dist == std::vector<double>{2.0, 1.0, 0.0});
  CHECK(f.next_hop_count == std::vector<int>{1, 1, 0});
}

TEST_CASE("six-node example distances") {
  const Graph g = gen_fig1_instance().graph;
  InterdictionPlan none;
  DistanceField f = distances_to_target(g, 5, none);
  CHECK(f.dist[0] == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(f.next_hop_count[0] == 2);
  CHECK(f.next_hop_count[4] == 1);

  InterdictionPlan plan(1000.0);
  plan.interdict(g.edge_id(0, 2));
  plan.interdict(g.edge_id(0, 3));
  f = distances_to_target(g, 5, plan);
  CHECK(f.dist[0] == doctest::Approx(8.01).epsilon(1e-15));
  CHECK(f.next_hop_count[0] == 1);
}

TEST_CASE("unreachable nodes get infinite distance") {
  const Graph g(4, {{0, 1, 1.0, std::nullopt}, {2, 3, 1.0, std::nullopt}});
  const DistanceField f = distances_to_target(g, 1, InterdictionPlan{});
  CHECK(f.dist[0] == 1.0);
  CHECK(std::isinf(f.dist[2]));
  CHECK(std::isinf(f.dist[3]));
}

TEST_CASE("target access") {
  const NodeId src0[] = {0};
  CHECK(check_target_access(path_graph(), 2, src0));
  const Graph isolated(3, {{0, 1, 1.0, std::nullopt}});
  const NodeId src2[] = {2};
  CHECK_FALSE(check_target_access(isolated, 1, src2));
  CHECK(check_target_access(gen_fig1_instance().graph, 5, src0));
}

TEST_CASE("interdictable edges skip self-loops") {
  const Graph g(2, {{0, 0, 0.0, std::nullopt}, {0, 1, 1.0, std::nullopt}, {1, 0, 1.0, std::nullopt}});
  CHECK(interdictable_edges(g) == std::vector<EdgeId>{1, 2});
}

TEST_CASE("edge list round trip") {
  std::istringstream in(
      "# comment line\n"
      "0 1 1.5\n"
      "1 2 2.25 0.5   # trailing comment\n"
      "\n"
      "2 0 0.125 1\n");
  const Graph g = read_edge_list(in);
  CHECK(g.num_nodes() == 3);
  REQUIRE(g.num_edges() == 3);
  CHECK(g.edge(1).evasion_prob == 0.5);
  CHECK_FALSE(g.edge(0).evasion_prob.has_value());

  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  const Graph h = read_edge_list(back);
  REQUIRE(h.num_edges() == g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    CHECK(h.edges()[e].tail == g.edges()[e].tail);
    CHECK(h.edges()[e].head == g.edges()[e].head);
    CHECK(h.edges()[e].cost == g.edges()[e].cost);
    CHECK(h.edges()[e].evasion_prob == g.edges()[e].evasion_prob);
  }

  std::istringstream bad("0 1\n");
  CHECK_THROWS_AS(read_edge_list(bad), GraphError);
  std::istringstream bad_number("0 1 x\n");
  CHECK_THROWS_AS(read_edge_list(bad_number), GraphError);
  std::istringstream dup("0 1 1\n0 1 2\n");
  CHECK_THROWS_AS(read_edge_list(dup), GraphError);
}

TEST_CASE("property: interdiction never shortens distances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_cyclic(10, rng);
    const Graph& g = inst.graph;
    InterdictionPlan plan(testing::uniform(rng, 0.1, 5.0));
    DistanceField before = distances_to_target(g, inst.target, plan);
    for (EdgeId e : interdictable_edges(g)) {
      if (testing::uniform(rng, 0.0, 1.0) > 0.3) continue;
      plan.interdict(e);
      const DistanceField after = distances_to_target(g, inst.target, plan);
      for (std::size_t i = 0; i < after.dist.size(); ++i) CHECK(after.dist[i] >= before.dist[i]);
      before = after;
    }
  }
}

TEST_CASE("property: relaxed triangle inequality") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_cyclic(12, rng);
    const Graph& g = inst.graph;
    const DistanceField f = distances_to_target(g, inst.target, InterdictionPlan{});
    CHECK(f.dist[static_cast<std::size_t>(inst.target)] == 0.0);
    for (const Edge& e : g.edges()) {
      const double lhs = f.dist[static_cast<std::size_t>(e.tail)];
      const double rhs = e.cost + f.dist[static_cast<std::size_t>(e.head)];
      CHECK((lhs <= rhs || nearly_equal(lhs, rhs, tol::kTie)));
    }
  }
}

TEST_CASE("property: reversed Dijkstra equals forward Dijkstra") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 2, 12);
    // Integer costs make both summation orders exact.
    const auto inst = testing::random_dag(n, rng, 0.4, true);
    const Graph& g = inst.graph;
    const DistanceField f = distances_to_target(g, inst.target, InterdictionPlan{});
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
      CHECK(f.dist[static_cast<std::size_t>(s)] == forward_distance(g, s, inst.target));
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testing::random_cyclic(testing::uniform_int(rng, 2, 12), rng);
    const DistanceField f = distances_to_target(inst.graph, inst.target, InterdictionPlan{});
    for (NodeId s = 0; s < inst.graph.num_nodes(); ++s) {
      CHECK(testing::close_rel(f.dist[static_cast<std::size_t>(s)],
                               forward_distance(inst.graph, s, inst.target), 1e-12));
    }
  }
}
