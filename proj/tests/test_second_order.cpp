#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "delaycent/quadrature.hpp"
#include "delaycent/second_order.hpp"
#include "generators.hpp"

using namespace delaycent;

TEST(Quadrature, PolynomialsAreExact) {
  const std::vector<double> bp{0.0, 1.0, 3.0};
  const auto r = integrate_adaptive([](double x) { return x * x * x - 2.0 * x; }, bp, {});
  EXPECT_NEAR(r.value, 81.0 / 4.0 - 9.0, 1e-12);
}

TEST(Quadrature, LorentzianToTolerance) {
  const std::vector<double> bp = geometric_breakpoints(1e-3, 1e4);
  QuadratureOptions opt;
  opt.abs_tol = 1e-11;
  const auto r = integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, bp, opt);
  EXPECT_NEAR(r.value, std::atan(1e4), 1e-10);
  EXPECT_GT(r.panels, bp.size() - 1);
}

TEST(Quadrature, BudgetAndInputErrors) {
  const std::vector<double> bp{-1.0, 1.0};
  QuadratureOptions opt;
  opt.max_panels = 16;
  opt.abs_tol = 1e-14;
  EXPECT_THROW(integrate_adaptive([](double x) { return 1.0 / std::sqrt(std::abs(x)); }, bp, opt),
               NumericError);
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(integrate_adaptive([](double x) { return x; }, bad, {}), InputError);
  EXPECT_THROW(geometric_breakpoints(0.0, 1.0), InputError);
}

TEST(HKernel, DelayFreeForm) {
  // (λ - ω²)² + ω² b² λ²
  EXPECT_DOUBLE_EQ(h_kernel(2.0, 0.0, 0.5, 3.0), (2.0 - 9.0) * (2.0 - 9.0) + 9.0 * 1.0);
}

TEST(FIntegral, DelayFreeClosedForm) {
  for (double lambda : {0.05, 0.3, 1.0, 2.0, 7.5, 40.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      SecondOrderConfig cfg;
      cfg.b = b;
      const double expected = 1.0 / (2.0 * b * lambda * lambda);
      EXPECT_NEAR(f_integral(lambda, cfg), expected, 1e-8 * std::max(1.0, expected))
          << "lambda " << lambda << " b " << b;
    }
  }
}

TEST(FIntegral, SymmetricAndTwoSidedAgree) {
  for (double tau : {0.0, 0.1, 0.3}) {
    SecondOrderConfig one;
    one.tau = tau;
    SecondOrderConfig two = one;
    two.exploit_symmetry = false;
    EXPECT_NEAR(f_integral(1.3, one), f_integral(1.3, two), 2e-9) << tau;
  }
}

TEST(FIntegral, CutoffIndependent) {
  SecondOrderConfig cfg;
  cfg.tau = 0.2;
  const double base = f_integral(2.0, cfg);
  cfg.min_cutoff = 1e4;
  EXPECT_NEAR(f_integral(2.0, cfg), base, 2e-9);
}

TEST(FIntegral, MarginalConfigurationFails) {
  // λ = b = 1: h vanishes at ω² = φ (golden ratio) when cos(ωτ) = 1/ω².
  const double omega = std::sqrt((1.0 + std::sqrt(5.0)) / 2.0);
  SecondOrderConfig cfg;
  cfg.tau = std::acos(1.0 / (omega * omega)) / omega;
  EXPECT_NEAR(h_kernel(1.0, cfg.tau, 1.0, omega), 0.0, 1e-12);
  EXPECT_THROW(f_integral(1.0, cfg), NumericError);
}

TEST(FIntegral, RejectsBadConfig) {
  SecondOrderConfig cfg;
  cfg.b = 0.0;
  EXPECT_THROW(f_integral(1.0, cfg), InputError);
  cfg.b = 1.0;
  EXPECT_THROW(f_integral(0.0, cfg), InputError);
  cfg.tau = -1.0;
  EXPECT_THROW(f_integral(1.0, cfg), InputError);
}

TEST(SecondOrder, TwoNodesUnitGain) {
  const ConsensusNetwork net(path_graph(2));
  const auto r = so_node_centrality(net, SecondOrderConfig{});
  EXPECT_NEAR(r.indices(0), 0.0625, 1e-9);
  EXPECT_NEAR(r.indices(1), 0.0625, 1e-9);
  EXPECT_EQ(r.structure, "second-order-dynamics");
  ASSERT_EQ(r.extras.size(), 2u);
  EXPECT_EQ(r.extras[0].first, "b");
  EXPECT_TRUE(std::isnan(r.tau_max));
}

TEST(SecondOrderProperty, DelayFreeMatchesClosedForm) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ConsensusNetwork net(gen::random_connected_graph(seed));
    for (double b : {0.5, 2.0}) {
      SecondOrderConfig cfg;
      cfg.b = b;
      const Eigen::VectorXd q = so_node_centrality(net, cfg).indices;
      const Eigen::VectorXd c = so_zero_delay_closed_form(net, b);
      EXPECT_LT((q - c).cwiseAbs().maxCoeff(), 1e-7) << "seed " << seed;
    }
  }
}

TEST(SecondOrderProperty, SmallDelayIncreasesIndices) {
  const ConsensusNetwork net(path_graph(4));
  SecondOrderConfig cfg;
  const Eigen::VectorXd base = so_node_centrality(net, cfg).indices;
  cfg.tau = 0.05;
  const Eigen::VectorXd delayed = so_node_centrality(net, cfg).indices;
  EXPECT_TRUE(((delayed - base).array() > 0.0).all());
}

TEST(SecondOrder, DisconnectedRejected) {
  const ConsensusNetwork net(WeightedGraph::from_edges(3, {{0, 1, 1.0}}));
  EXPECT_THROW(so_node_centrality(net, SecondOrderConfig{}), StabilityError);
}
