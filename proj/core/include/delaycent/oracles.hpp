#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "delaycent/centrality.hpp"

namespace delaycent {

/// (1/2π) ∫ dω / |jω + λ e^{-jτω}|² over the real line, by two-sided adaptive
/// quadrature. The 1/ω² asymptote beyond the cutoff is added analytically and
/// the remainder bounded. Independent of the closed form
/// cos(λτ)/(2λ(1 - sin λτ)). Throws StabilityError when τλ >= π/2.
double mode_integral(double lambda, double tau, double abs_tol = 1e-10);

/// Euler-Maruyama run parameters. Delays are snapped to the nearest multiple
/// of dt.
struct SimConfig {
  double tau = 0.0;
  double dt = 1e-3;
  double burn_in = 50.0;
  double horizon = 500.0;
  int n_traj = 32;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: worker_count()

  /// dt > 0, dt <= τ/20 when τ > 0, burn_in and horizon > 0, n_traj >= 1,
  /// and |round(τ/dt)·dt - τ| <= 0.5% of τ.
  void validate() const;
  std::size_t delay_steps() const;
  double tau_snapped() const { return static_cast<double>(delay_steps()) * dt; }
};

struct SimResult {
  double rho_hat = 0.0;           // time and trajectory average of ‖M_n x‖²
  double std_err = 0.0;           // across per-trajectory means
  Eigen::VectorXd per_node_var;   // averages of y_i²; sums to rho_hat
  double tau_snapped = 0.0;
  std::size_t delay_steps = 0;
  std::size_t effective_samples = 0;  // independent trajectory means
  SimConfig config;
};

/// Seed of trajectory `index`: splitmix64(splitmix64(seed) ^ index).
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index);

/// Simulates x_{k+1} = x_k - dt L x_{k-d} + B diag(σ) √dt z_k from a zero
/// history and zero initial state. Results are bit-identical for equal
/// inputs regardless of thread count. Throws NumericError if ‖x‖∞ > 1e8.
SimResult simulate(const GraphMatrices& gm, const Eigen::MatrixXd& input,
                   const Eigen::VectorXd& variances, const SimConfig& cfg);

struct McCentrality {
  Eigen::VectorXd eta_hat;
  Eigen::VectorXd std_err;
  double tau_snapped = 0.0;
};

/// Central difference of the simulated dispersion in σ_i² (1 ± δ, others at
/// 1) with common random numbers for each pair.
McCentrality mc_node_centrality(const ConsensusNetwork& net, const NoiseStructure& s,
                                const SimConfig& cfg, double delta = 0.5);

/// Second-order variant: x_{k+1} = x_k + dt v_k,
/// v_{k+1} = v_k - dt L (x_{k-d} + b v_{k-d}) + diag(σ) √dt z_k.
SimResult simulate_second_order(const GraphMatrices& gm, const Eigen::VectorXd& variances,
                                double b, const SimConfig& cfg);

}  // namespace delaycent
