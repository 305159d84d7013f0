#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "delaycent/graph.hpp"
#include "generators.hpp"

using namespace delaycent;

namespace {

GraphErrorKind parse_error_kind(const std::string& text, std::size_t* line = nullptr) {
  try {
    parse_edge_list(text);
  } catch (const GraphError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return GraphErrorKind::Empty;
}

}  // namespace

TEST(EdgeList, ParsesCommentsHeaderAndDefaultWeight) {
  const auto g = parse_edge_list("# triangle-ish\nn=4\n0 1\n2 1 2.5\n\n  # trailing\n3 0 0.5\n");
  EXPECT_EQ(g.node_count(), 4);
  ASSERT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.edge(0), (Edge{0, 1, 1.0}));
  EXPECT_EQ(g.edge(1), (Edge{0, 3, 0.5}));
  EXPECT_EQ(g.edge(2), (Edge{1, 2, 2.5}));
}

TEST(EdgeList, NodeCountFromMaxId) {
  EXPECT_EQ(parse_edge_list("0 1\n1 2\n").node_count(), 3);
}

TEST(EdgeList, HeaderAllowsIsolatedNodes) {
  const auto g = parse_edge_list("n=5\n0 1\n");
  EXPECT_EQ(g.node_count(), 5);
  EXPECT_FALSE(is_connected(g));
}

TEST(EdgeList, RejectsSelfLoopWithLine) {
  std::size_t line = 0;
  EXPECT_EQ(parse_error_kind("0 1\n2 2\n", &line), GraphErrorKind::SelfLoop);
  EXPECT_EQ(line, 2u);
}

TEST(EdgeList, RejectsDuplicateEitherOrientation) {
  std::size_t line = 0;
  EXPECT_EQ(parse_error_kind("0 1\n1 2\n1 0 3\n", &line), GraphErrorKind::DuplicateEdge);
  EXPECT_EQ(line, 3u);
}

TEST(EdgeList, RejectsNonPositiveWeights) {
  EXPECT_EQ(parse_error_kind("0 1 0\n"), GraphErrorKind::NonPositiveWeight);
  EXPECT_EQ(parse_error_kind("0 1 -2\n"), GraphErrorKind::NonPositiveWeight);
  EXPECT_EQ(parse_error_kind("0 1 inf\n"), GraphErrorKind::NonPositiveWeight);
}

TEST(EdgeList, RejectsMalformedTokens) {
  EXPECT_EQ(parse_error_kind("0 x\n"), GraphErrorKind::MalformedToken);
  EXPECT_EQ(parse_error_kind("0 1 1.5abc\n"), GraphErrorKind::MalformedToken);
  EXPECT_EQ(parse_error_kind("0\n"), GraphErrorKind::MalformedToken);
  EXPECT_EQ(parse_error_kind("0 1 2 3\n"), GraphErrorKind::MalformedToken);
  EXPECT_EQ(parse_error_kind("-1 2\n"), GraphErrorKind::MalformedToken);
}

TEST(EdgeList, RejectsBadHeaders) {
  EXPECT_EQ(parse_error_kind("0 1\nn=3\n"), GraphErrorKind::InvalidHeader);
  EXPECT_EQ(parse_error_kind("n=0\n"), GraphErrorKind::InvalidHeader);
  EXPECT_EQ(parse_error_kind("n=3\nn=3\n"), GraphErrorKind::InvalidHeader);
}

TEST(EdgeList, RejectsOutOfRangeAgainstHeader) {
  std::size_t line = 0;
  EXPECT_EQ(parse_error_kind("n=2\n0 1\n1 2\n", &line), GraphErrorKind::NodeOutOfRange);
  EXPECT_EQ(line, 3u);
}

TEST(EdgeList, RejectsEmpty) {
  EXPECT_EQ(parse_error_kind("# nothing\n"), GraphErrorKind::Empty);
}

TEST(EdgeList, ErrorMessageNamesLine) {
  try {
    parse_edge_list("0 1\n0 1\n");
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(EdgeList, FixturesLoad) {
  for (const char* name : {"k2.edges", "p3.edges", "c4.edges", "s5.edges", "twins8.edges",
                           "er10.edges"}) {
    std::ifstream in(gen::data_path(name));
    ASSERT_TRUE(in) << name;
    const auto g = parse_edge_list(in);
    EXPECT_TRUE(is_connected(g)) << name;
  }
  std::ifstream in(gen::data_path("twins8.edges"));
  const auto twins = parse_edge_list(in);
  EXPECT_EQ(twins.node_count(), 8);
  EXPECT_EQ(twins.edge_count(), 10u);
}

TEST(GraphProperty, EdgeListAndJsonRoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = gen::random_connected_graph(seed, 2, 15);
    EXPECT_EQ(parse_edge_list(to_edge_list(g)), g) << "seed " << seed;
    EXPECT_EQ(graph_from_json(to_json(g)), g) << "seed " << seed;
  }
}

TEST(GraphJson, RejectsBadSchema) {
  EXPECT_THROW(graph_from_json("{\"n\": 2}"), GraphError);
  EXPECT_THROW(graph_from_json("{\"n\": 2, \"edges\": [[0, \"a\"]]}"), GraphError);
  EXPECT_THROW(graph_from_json("not json"), GraphError);
  EXPECT_THROW(graph_from_json("{\"n\": 2, \"edges\": [[0, 0, 1]]}"), GraphError);
}

TEST(GraphProperty, MatricesAreConsistent) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto g = gen::random_connected_graph(seed);
    const auto gm = build_matrices(g);
    const Eigen::MatrixXd ewe = gm.incidence * gm.weight_diag() * gm.incidence.transpose();
    EXPECT_LT((ewe - gm.laplacian).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((gm.degree_diag() - gm.adjacency - gm.laplacian).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(gm.laplacian.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(gm.laplacian.isApprox(gm.laplacian.transpose()));
    for (Eigen::Index e = 0; e < gm.incidence.cols(); ++e) {
      EXPECT_EQ(gm.incidence.col(e).sum(), 0.0);
      EXPECT_EQ(gm.incidence(g.edge(e).i, e), 1.0);
    }
  }
}

TEST(Graph, CanonicalOrderAndLookup) {
  const auto g = WeightedGraph::from_edges(4, {{3, 1, 2.0}, {0, 2, 1.0}, {1, 0, 0.5}});
  EXPECT_EQ(g.edge(0), (Edge{0, 1, 0.5}));
  EXPECT_EQ(g.edge(1), (Edge{0, 2, 1.0}));
  EXPECT_EQ(g.edge(2), (Edge{1, 3, 2.0}));
  EXPECT_EQ(g.find_edge(3, 1), 2u);
  EXPECT_FALSE(g.find_edge(2, 3).has_value());
  EXPECT_EQ(g.with_weight(1, 4.0).edge(1).w, 4.0);
  EXPECT_THROW(g.with_weight(1, 0.0), GraphError);
}

TEST(Graph, Connectivity) {
  EXPECT_TRUE(is_connected(path_graph(5)));
  EXPECT_FALSE(is_connected(WeightedGraph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}})));
  EXPECT_TRUE(is_connected(WeightedGraph::from_edges(1, {})));
}

TEST(Graph, ScaleWeights) {
  const auto g = scale_weights(cycle_graph(5, 2.0), 0.25);
  for (const Edge& e : g.edges()) EXPECT_DOUBLE_EQ(e.w, 0.5);
  EXPECT_THROW(scale_weights(g, 0.0), InputError);
  EXPECT_THROW(scale_weights(g, -1.0), InputError);
}

TEST(Graph, Families) {
  EXPECT_EQ(path_graph(8).edge_count(), 7u);
  EXPECT_EQ(cycle_graph(6).edge_count(), 6u);
  EXPECT_EQ(complete_graph(5).edge_count(), 10u);
  const auto star = star_graph(5);
  EXPECT_EQ(star.node_count(), 5);
  EXPECT_EQ(star.edge_count(), 4u);
  for (const Edge& e : star.edges()) EXPECT_EQ(e.i, 0);
}
