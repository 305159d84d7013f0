#include <random>

#include <benchmark/benchmark.h>

#include "delaycent/centrality.hpp"
#include "delaycent/oracles.hpp"
#include "delaycent/second_order.hpp"

using namespace delaycent;

namespace {

WeightedGraph ring_with_chords(int n) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, w(rng)});
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (const Edge& e : edges) used[e.i][e.j] = used[e.j][e.i] = true;
  for (int k = 0; k < 2 * n; ++k) {
    const int a = node(rng), b = node(rng);
    if (a == b || used[a][b]) continue;
    used[a][b] = used[b][a] = true;
    edges.push_back({a, b, w(rng)});
  }
  return WeightedGraph::from_edges(n, std::move(edges));
}

void BM_Decompose(benchmark::State& state) {
  const auto gm = build_matrices(ring_with_chords(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(gm.laplacian));
}
BENCHMARK(BM_Decompose)->Arg(50)->Arg(100)->Arg(200);

void BM_NodeCentrality(benchmark::State& state) {
  const ConsensusNetwork net(ring_with_chords(static_cast<int>(state.range(0))));
  const double tau = 0.5 * net.stability(0.0).tau_max;
  const auto s = state.range(1) == 0 ? NoiseStructure::dynamics() : NoiseStructure::emitter();
  for (auto _ : state) benchmark::DoNotOptimize(node_centrality(net, s, tau));
}
BENCHMARK(BM_NodeCentrality)->Args({50, 0})->Args({100, 0})->Args({200, 0})->Args({100, 1});

void BM_LinkCentrality(benchmark::State& state) {
  const ConsensusNetwork net(ring_with_chords(static_cast<int>(state.range(0))));
  const double tau = 0.5 * net.stability(0.0).tau_max;
  for (auto _ : state) {
    benchmark::DoNotOptimize(link_centrality(net, NoiseStructure::comm_channel(), tau));
  }
}
BENCHMARK(BM_LinkCentrality)->Arg(50)->Arg(100)->Arg(200);

void BM_ModeIntegral(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mode_integral(1.0, 0.4));
}
BENCHMARK(BM_ModeIntegral);

void BM_SecondOrderF(benchmark::State& state) {
  SecondOrderConfig cfg;
  cfg.tau = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(f_integral(2.0, cfg));
}
BENCHMARK(BM_SecondOrderF);

void BM_Simulate(benchmark::State& state) {
  const auto gm = build_matrices(ring_with_chords(static_cast<int>(state.range(0))));
  SimConfig cfg;
  cfg.tau = 0.05;
  cfg.burn_in = 1.0;
  cfg.horizon = 10.0;
  cfg.n_traj = 1;
  const auto n = gm.laplacian.rows();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate(gm, Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n), cfg));
  }
}
BENCHMARK(BM_Simulate)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
