#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace locindep;
using namespace testing_support;

namespace {

// Brute force: does a simple directed path of length >= 2 lead from j to k?
bool indirect_path(const std::vector<std::vector<bool>>& adj, std::size_t j, std::size_t k) {
  const std::size_t m = adj.size();
  std::vector<bool> on(m, false);
  std::function<bool(std::size_t, std::size_t)> walk = [&](std::size_t u, std::size_t len) {
    for (std::size_t v = 0; v < m; ++v) {
      if (!adj[u][v] || on[v]) continue;
      if (v == k) {
        if (len + 1 >= 2) return true;
        continue;
      }
      on[v] = true;
      const bool found = walk(v, len + 1);
      on[v] = false;
      if (found) return true;
    }
    return false;
  };
  on[j] = true;
  return walk(j, 0);
}

PairClass brute_force_class(const std::vector<std::vector<bool>>& adj, std::size_t j, std::size_t k) {
  if (adj[j][k]) return PairClass::Direct;
  return indirect_path(adj, j, k) ? PairClass::Indirect : PairClass::None;
}

}  // namespace

TEST(Graph, ExampleEdges) {
  const std::set<std::pair<std::size_t, std::size_t>> expected = {{1, 0}, {2, 0}, {0, 1}, {2, 1}, {1, 2}};
  for (int which : {1, 2, 3}) EXPECT_EQ(syntactic_graph(builtin_example(which)).edge_set(), expected) << which;
}

TEST(Graph, ExampleOnePairTaxonomy) {
  const auto g = syntactic_graph(builtin_example(1));
  EXPECT_EQ(classify_pair(g, 0, 2), PairClass::Indirect);
  EXPECT_EQ(classify_pair(g, 1, 2), PairClass::Direct);
  EXPECT_EQ(classify_pair(g, 2, 0), PairClass::Direct);
  EXPECT_EQ(pair_taxonomy(g, 0, 2), std::make_pair(PairClass::Indirect, PairClass::Direct));
  EXPECT_THROW(classify_pair(g, 1, 1), SpecError);
}

TEST(Graph, SingleComponentHasNoEdges) {
  const auto g = syntactic_graph(make_spec({diffusion("-x1")}));
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(ancestors(g, 0), (std::set<std::size_t>{0}));
}

TEST(Graph, SelfLoopsAndRangeRejected) {
  InfluenceGraph g(3);
  EXPECT_THROW(g.add_edge(1, 1), SpecError);
  EXPECT_THROW(g.add_edge(0, 3), SpecError);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  EXPECT_EQ(g.edges().size(), 1u);
}

TEST(Graph, ClassifyMatchesBruteForce) {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + rng() % 7;
    const double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    InfluenceGraph g(m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b && std::uniform_real_distribution<double>(0, 1)(rng) < density) {
          adj[a][b] = true;
          g.add_edge(a, b);
        }
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        if (j != k) { ASSERT_EQ(classify_pair(g, j, k), brute_force_class(adj, j, k)) << trial; }
  }
}

TEST(Graph, AncestorsAreClosed) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 8;
    InfluenceGraph g(m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b && rng() % 4 == 0) g.add_edge(a, b);
    for (std::size_t k = 0; k < m; ++k) {
      const auto an = ancestors(g, k);
      EXPECT_TRUE(an.contains(k));
      for (auto v : an) {
        const auto inner = ancestors(g, v);
        for (auto u : inner) ASSERT_TRUE(an.contains(u));
      }
      // Every edge into the set starts inside it.
      for (const auto& e : g.edges())
        if (an.contains(e.to)) { ASSERT_TRUE(an.contains(e.from)); }
    }
  }
}

TEST(Graph, InducedSubgraph) {
  const auto g = syntactic_graph(builtin_example(1));
  const auto sub = induced_subgraph(g, {0, 2});
  EXPECT_EQ(sub.edge_set(), (std::set<std::pair<std::size_t, std::size_t>>{{2, 0}}));
  EXPECT_EQ(classify_pair(sub, 0, 2), PairClass::None);
}

TEST(Graph, DotOutput) {
  InfluenceGraph g(2);
  g.add_edge(0, 1);
  EXPECT_EQ(to_dot(g), "digraph influence {\n  \"X1\";\n  \"X2\";\n  \"X1\" -> \"X2\";\n}\n");
  InfluenceGraph s(2);
  s.add_edge(1, 0, Provenance::Statistical, 0.25);
  EXPECT_EQ(to_dot(s, {"a", "b"}),
            "digraph influence {\n  \"a\";\n  \"b\";\n  \"b\" -> \"a\" [style=dashed, label=\"p=0.25\"];\n}\n");
}

TEST(Graph, JsonOutput) {
  InfluenceGraph g(3);
  g.add_edge(2, 0);
  g.add_edge(0, 1, Provenance::Statistical, 0.01);
  g.mark_undecided(1, 2);
  const auto doc = to_json(g);
  EXPECT_EQ(doc["m"], 3);
  EXPECT_EQ(doc["edges"], nlohmann::json::parse("[[3,1],[1,2]]"));
  EXPECT_EQ(doc["provenance"][0]["kind"], "syntactic");
  EXPECT_EQ(doc["provenance"][1]["p_value"], 0.01);
  EXPECT_EQ(doc["undecided"], nlohmann::json::parse("[[2,3]]"));
}

TEST(Graph, TaxonomyTable) {
  const auto table = taxonomy_table(syntactic_graph(builtin_example(1)));
  EXPECT_NE(table.find("from\\to"), std::string::npos);
  // Row X1: -, direct, indirect.
  EXPECT_NE(table.find("X1      -       direct  indirect"), std::string::npos) << table;
}
