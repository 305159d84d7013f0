#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "delaycent/centrality.hpp"

namespace delaycent {

/// Delayed second-order (platoon) consensus
///   ẋ = v,  v̇ = -L x(t-τ) - b L v(t-τ) + ξ,  y = M_n x
/// under dynamics noise.
struct SecondOrderConfig {
  double b = 1.0;            // velocity coupling gain, > 0
  double tau = 0.0;          // delay, >= 0
  double quad_tol = 1e-9;    // absolute accuracy of each f(λ)
  std::size_t max_panels = std::size_t{1} << 16;
  /// Lower bound for the truncation frequency Ω; 0 selects
  /// max(10 λ(1+b), 50/τ) before tail-bound growth.
  double min_cutoff = 0.0;
  /// Integrate [0, Ω] and double (the integrand is even) rather than
  /// integrating [-Ω, Ω] directly.
  bool exploit_symmetry = true;

  void validate() const;
};

/// h(λ, τ, b, ω) = (λ - ω² cos ωτ)² + ω² (bλ - ω sin ωτ)².
double h_kernel(double lambda, double tau, double b, double omega);

/// f(λ, τ, b) = (1/2π) ∫ dω / h(λ, τ, b, ω) over the real line, by adaptive
/// quadrature with an analytic ω⁻⁴ tail bound. Throws NumericError when h
/// nearly vanishes on the evaluated nodes (marginal or unstable
/// configuration) or the panel budget runs out.
double f_integral(double lambda, const SecondOrderConfig& cfg);

/// η_i = Σ_{j≥2} Q_ij² f(λ_j, τ, b). The zero mode is excluded.
CentralityReport so_node_centrality(const ConsensusNetwork& net, const SecondOrderConfig& cfg);

/// Delay-free closed form (1/(2b)) diag((L²)†).
Eigen::VectorXd so_zero_delay_closed_form(const ConsensusNetwork& net, double b);

}  // namespace delaycent
