#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "delaycent/centrality.hpp"
#include "delaycent/oracles.hpp"
#include "generators.hpp"

using namespace delaycent;

namespace {

ConsensusNetwork random_network(std::uint64_t seed) {
  return ConsensusNetwork(gen::random_connected_graph(seed));
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Structures, NamesRoundTrip) {
  for (const auto& s : standard_structures()) {
    EXPECT_EQ(parse_structure_tag(to_string(s.tag())), s.tag());
  }
  EXPECT_EQ(parse_structure_tag("comm-channel"), StructureTag::CommChannel);
  EXPECT_FALSE(parse_structure_tag("bogus").has_value());
  EXPECT_EQ(standard_structures().size(), 6u);
}

TEST(ModeNorm, PinnedValues) {
  EXPECT_NEAR(mode_h2_norm(2.0, 0.0), 0.25, 1e-15);
  // cos(0.4) / (4 (1 - sin 0.4))
  EXPECT_NEAR(mode_h2_norm(2.0, 0.2), 0.3771244, 1e-7);
}

TEST(NodeCentrality, PathOfThreeDelayFree) {
  const ConsensusNetwork net(path_graph(3));
  const auto r = node_centrality(net, NoiseStructure::dynamics(), 0.0);
  EXPECT_NEAR(r.indices(0), 0.277778, 1e-6);
  EXPECT_NEAR(r.indices(1), 0.111111, 1e-6);
  EXPECT_NEAR(r.indices(2), 0.277778, 1e-6);
  EXPECT_EQ(r.ranking, (std::vector<int>{0, 2, 1}));
  ASSERT_EQ(r.tie_groups.size(), 1u);
  EXPECT_EQ(r.tie_groups[0], (std::vector<int>{0, 2}));
  EXPECT_NEAR(r.tau_max, std::numbers::pi / 6, 1e-12);
}

TEST(NodeCentrality, TwoNodesAtPiOverEight) {
  const ConsensusNetwork net(path_graph(2));
  const auto r = node_centrality(net, NoiseStructure::dynamics(), std::numbers::pi / 8);
  EXPECT_NEAR(r.indices(0), 0.3017767, 1e-7);
  EXPECT_NEAR(r.indices(1), 0.3017767, 1e-7);
}

TEST(NodeCentrality, RejectsUnstableAndLinkStructures) {
  const ConsensusNetwork net(path_graph(2));
  try {
    node_centrality(net, NoiseStructure::dynamics(), 1.0);
    FAIL();
  } catch (const StabilityError& e) {
    EXPECT_NEAR(e.tau_max(), std::numbers::pi / 4, 1e-12);
    EXPECT_NE(std::string(e.what()).find("0.785398"), std::string::npos) << e.what();
  }
  EXPECT_THROW(node_centrality(net, NoiseStructure::measurement(), 0.0), InputError);
  EXPECT_THROW(link_centrality(net, NoiseStructure::sensor(), 0.0), InputError);
  const ConsensusNetwork split(WeightedGraph::from_edges(3, {{0, 1, 1.0}}));
  EXPECT_THROW(centrality(split, NoiseStructure::dynamics(), 0.0), StabilityError);
}

TEST(CentralityProperty, ShortcutsMatchGenericForm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const auto& gm = net.matrices();
    for (double frac : {0.0, 0.4, 0.9}) {
      const double tau = frac * net.stability(0.0).tau_max;
      for (const auto& s : standard_structures()) {
        const Eigen::VectorXd fast = centrality(net, s, tau).indices;
        const Eigen::VectorXd slow = generic_indices(net, input_matrix(gm, s), tau);
        EXPECT_LT(max_abs(fast - slow), 1e-10 * (1.0 + max_abs(slow)))
            << to_string(s.tag()) << " seed " << seed << " tau " << tau;
      }
    }
  }
}

TEST(CentralityProperty, DecompositionIdentity) {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 30; seed < 50; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const double tau = 0.7 * net.stability(0.0).tau_max;
    for (const auto& s : standard_structures()) {
      const auto var = gen::random_variances(rng, channel_count(net, s));
      const double rho = performance(net, NoiseSpec{s, var}, tau);
      const double sum = centrality(net, s, tau).indices.dot(var);
      EXPECT_LE(std::abs(rho - sum), 1e-10 * rho) << to_string(s.tag());
    }
  }
}

TEST(CentralityProperty, PerformanceMatchesQuadratureOracle) {
  for (std::uint64_t seed = 60; seed < 66; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const double tau = 0.5 * net.stability(0.0).tau_max;
    const auto& dec = net.spectrum();
    for (const auto& s : standard_structures()) {
      const Eigen::MatrixXd proj = dec.eigenvectors.transpose() * input_matrix(net.matrices(), s);
      double oracle = 0.0;
      for (Eigen::Index k = 1; k < dec.size(); ++k) {
        oracle += proj.row(k).squaredNorm() * mode_integral(dec.eigenvalues(k), tau, 1e-11);
      }
      const double rho = performance(net, NoiseSpec{s, std::nullopt}, tau);
      EXPECT_NEAR(rho, oracle, 1e-8 * rho) << to_string(s.tag());
    }
  }
}

TEST(CentralityProperty, StrictlyIncreasingInDelay) {
  for (std::uint64_t seed = 70; seed < 80; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const double tmax = net.stability(0.0).tau_max;
    for (const auto& s : standard_structures()) {
      Eigen::VectorXd prev = centrality(net, s, 0.0).indices;
      for (int k = 1; k <= 10; ++k) {
        const Eigen::VectorXd cur = centrality(net, s, 0.09 * k * tmax).indices;
        EXPECT_TRUE(((cur - prev).array() > 0.0).all()) << to_string(s.tag()) << " step " << k;
        prev = cur;
      }
    }
  }
}

TEST(CentralityProperty, PermutationEquivariance) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 80; seed < 90; ++seed) {
    const auto g = gen::random_connected_graph(seed);
    const int n = g.node_count();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> moved;
    for (const Edge& e : g.edges()) moved.push_back({perm[e.i], perm[e.j], e.w});
    const ConsensusNetwork a(g);
    const ConsensusNetwork b(WeightedGraph::from_edges(n, moved));
    const double tau = 0.3 * a.stability(0.0).tau_max;
    for (const auto& s : standard_structures()) {
      const auto ra = centrality(a, s, tau);
      const auto rb = centrality(b, s, tau);
      for (Eigen::Index k = 0; k < ra.indices.size(); ++k) {
        Eigen::Index mapped = k;
        if (ra.domain == ChannelDomain::Nodes) {
          mapped = perm[k];
        } else {
          const Edge& e = g.edge(k);
          mapped = static_cast<Eigen::Index>(*b.graph().find_edge(perm[e.i], perm[e.j]));
        }
        EXPECT_NEAR(ra.indices(k), rb.indices(mapped), 1e-10 * (1.0 + std::abs(ra.indices(k))));
      }
    }
  }
}

TEST(LinkCentrality, StarMeasurementIsHalf) {
  const ConsensusNetwork net(star_graph(5));
  const auto r = link_centrality(net, NoiseStructure::measurement(), 0.0);
  for (Eigen::Index e = 0; e < r.indices.size(); ++e) EXPECT_NEAR(r.indices(e), 0.5, 1e-12);
  EXPECT_EQ(r.tie_groups.size(), 1u);
}

TEST(LinkCentrality, TreeMeasurementIsHalfResistance) {
  const ConsensusNetwork net(WeightedGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}}));
  const auto r = link_centrality(net, NoiseStructure::measurement(), 0.0);
  EXPECT_NEAR(r.indices(0), 0.5, 1e-12);
  EXPECT_NEAR(r.indices(1), 0.25, 1e-12);
  const auto c = link_centrality(net, NoiseStructure::comm_channel(), 0.0);
  EXPECT_NEAR(c.indices(0), 0.5, 1e-12);
  EXPECT_NEAR(c.indices(1), 1.0, 1e-12);
}

TEST(Symmetric, AutomorphicNodesTie) {
  for (const auto& g : {cycle_graph(6), complete_graph(5)}) {
    const ConsensusNetwork net(g);
    const double tau = 0.6 * net.stability(0.0).tau_max;
    for (const auto& s : standard_structures()) {
      const Eigen::VectorXd v = centrality(net, s, tau).indices;
      EXPECT_LT(v.maxCoeff() - v.minCoeff(), 1e-10) << to_string(s.tag());
    }
  }
}

TEST(Sensitivity, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 90; seed < 95; ++seed) {
    const auto g = gen::random_connected_graph(seed);
    const ConsensusNetwork net(g);
    const double tau = 0.5 * net.stability(0.0).tau_max;
    for (const auto& s : {NoiseStructure::dynamics(), NoiseStructure::sensor()}) {
      const Eigen::VectorXd kappa = link_sensitivity(net, s, tau);
      const double scale = max_abs(kappa);
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const double w = g.edge(e).w;
        const double h = 1e-4 * w;
        const double up = performance(ConsensusNetwork(g.with_weight(e, w + h)), {s, {}}, tau);
        const double down = performance(ConsensusNetwork(g.with_weight(e, w - h)), {s, {}}, tau);
        const double fd = (up - down) / (2.0 * h);
        EXPECT_NEAR(kappa(e), fd, 1e-5 * scale) << to_string(s.tag()) << " link " << e;
      }
    }
  }
}

TEST(Sensitivity, DelayFreeDynamicsIsNegative) {
  const ConsensusNetwork net(path_graph(4));
  const Eigen::VectorXd kappa = link_sensitivity(net, NoiseStructure::dynamics(), 0.0);
  EXPECT_TRUE((kappa.array() < 0.0).all());
  EXPECT_THROW(link_sensitivity(net, NoiseStructure::emitter(), 0.0), InputError);
}

TEST(Emitter, DisplayDiffersByHalfDegreeTerm) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const double tau = 0.4 * net.stability(0.0).tau_max;
    const Eigen::VectorXd exact = node_centrality(net, NoiseStructure::emitter(), tau).indices;
    const Eigen::VectorXd display = emitter_display_indices(net, tau);
    const auto p = kernel(net.spectrum(), [tau](double l) {
      return std::cos(tau * l) / (1.0 - std::sin(tau * l));
    });
    const Eigen::VectorXd expected_gap =
        0.5 * net.matrices().degrees.cwiseProduct(p.matrix.diagonal());
    EXPECT_LT(max_abs(display - exact - expected_gap), 1e-10 * (1.0 + max_abs(exact)));
  }
}

TEST(TauSweep, SinglePointHasNoFlips) {
  const ConsensusNetwork net(path_graph(5));
  const std::vector<double> grid{0.0};
  const auto sweep = tau_sweep(net, NoiseStructure::dynamics(), grid);
  EXPECT_EQ(sweep.reports.size(), 1u);
  EXPECT_TRUE(sweep.flips.empty());
}

TEST(TauSweep, ThreeNodePathInverts) {
  const ConsensusNetwork net(path_graph(3));
  const double tmax = net.stability(0.0).tau_max;
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(0.1 * k * tmax);
  const auto sweep = tau_sweep(net, NoiseStructure::dynamics(), grid);
  ASSERT_FALSE(sweep.flips.empty());
  EXPECT_EQ(sweep.reports.back().ranking.front(), 1);
  for (const auto& f : sweep.flips) {
    EXPECT_EQ(f.second, 1);
    EXPECT_LT(f.tau_from, f.tau_to);
  }
}

TEST(TauSweep, RejectsBadGrids) {
  const ConsensusNetwork net(path_graph(3));
  const std::vector<double> decreasing{0.2, 0.1};
  const std::vector<double> repeated{0.1, 0.1};
  const std::vector<double> unstable{0.1, 0.6};
  EXPECT_THROW(tau_sweep(net, NoiseStructure::dynamics(), decreasing), InputError);
  EXPECT_THROW(tau_sweep(net, NoiseStructure::dynamics(), repeated), InputError);
  EXPECT_THROW(tau_sweep(net, NoiseStructure::dynamics(), unstable), StabilityError);
}

TEST(ScaleSweep, DelayFreeRankingInvariant) {
  for (std::uint64_t seed = 110; seed < 115; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const std::vector<double> alphas{0.1, 1.0, 10.0};
    for (const auto& s : standard_structures()) {
      const auto sweep = scale_sweep(net, s, 0.0, alphas);
      for (bool m : sweep.matches_reference) EXPECT_TRUE(m) << to_string(s.tag());
    }
  }
}

TEST(Adversarial, WorstCaseEqualsPerformance) {
  for (std::uint64_t seed = 120; seed < 125; ++seed) {
    const ConsensusNetwork net = random_network(seed);
    const double tau = 0.5 * net.stability(0.0).tau_max;
    for (const auto& s : {NoiseStructure::dynamics(), NoiseStructure::sensor(),
                          NoiseStructure::receiver(), NoiseStructure::emitter()}) {
      const auto a = adversarial_allocation(net, s, tau);
      const auto r = node_centrality(net, s, tau);
      EXPECT_DOUBLE_EQ(a.worst_performance, net.node_count() * r.indices.maxCoeff());
      EXPECT_DOUBLE_EQ(a.variances.sum(), net.node_count());
      EXPECT_EQ(a.variances(a.target), net.node_count());
      // Any other allocation with the same budget does no worse.
      const double uniform = performance(net, NoiseSpec{s, std::nullopt}, tau);
      EXPECT_LE(uniform, a.worst_performance * (1.0 + 1e-12));
    }
  }
}

TEST(Performance, ValidatesVariances) {
  const ConsensusNetwork net(path_graph(3));
  EXPECT_THROW(performance(net, {NoiseStructure::dynamics(), Eigen::VectorXd::Ones(2)}, 0.0),
               InputError);
  Eigen::VectorXd neg = Eigen::VectorXd::Ones(3);
  neg(1) = -1.0;
  EXPECT_THROW(performance(net, {NoiseStructure::dynamics(), neg}, 0.0), InputError);
  EXPECT_EQ(performance(net, {NoiseStructure::dynamics(), Eigen::VectorXd::Zero(3)}, 0.0), 0.0);
}

TEST(Ranking, TiesAndStrictComparison) {
  Eigen::VectorXd v(5);
  v << 1.0, 3.0, 3.0 * (1 + 1e-12), 0.5, 1.0;
  const Ranking r = rank_indices(v);
  EXPECT_EQ(r.order, (std::vector<int>{1, 2, 0, 4, 3}));
  ASSERT_EQ(r.tie_groups.size(), 2u);
  EXPECT_EQ(r.tie_groups[0], (std::vector<int>{1, 2}));
  EXPECT_EQ(r.tie_groups[1], (std::vector<int>{0, 4}));
  EXPECT_EQ(compare_ranked(v, 1, 0), 1);
  EXPECT_EQ(compare_ranked(v, 3, 0), -1);
  EXPECT_EQ(compare_ranked(v, 1, 2), 0);
  EXPECT_EQ(rank_indices(Eigen::VectorXd::Zero(3)).tie_groups.size(), 1u);
}

TEST(RankingProperty, OrderIsNonIncreasing) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(12);
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = 0.25 * pick(rng);
    const Ranking r = rank_indices(v);
    ASSERT_EQ(r.order.size(), 12u);
    for (std::size_t k = 1; k < r.order.size(); ++k) {
      EXPECT_GE(v(r.order[k - 1]), v(r.order[k]));
      if (v(r.order[k - 1]) == v(r.order[k])) EXPECT_LT(r.order[k - 1], r.order[k]);
    }
  }
}
