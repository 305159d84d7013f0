#pragma once

#include <functional>

#include <Eigen/Core>

#include "delaycent/graph.hpp"

namespace delaycent {

/// Eigenpairs of a symmetric positive semidefinite matrix (in practice a
/// Laplacian). Eigenvalues ascend; those below zero_threshold() are clamped
/// to exactly 0 and counted in zero_mode_count.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues(k)
  int zero_mode_count = 0;

  Eigen::Index size() const { return eigenvalues.size(); }
  double max_eigenvalue() const { return size() ? eigenvalues(size() - 1) : 0.0; }
  bool is_zero_mode(Eigen::Index k) const { return eigenvalues(k) == 0.0; }
  bool connected() const { return zero_mode_count == 1; }
};

/// Relative threshold used for zero modes and spectral pseudoinverses.
inline constexpr double kSpectralRelTol = 1e-9;

/// Throws InputError for a non-square, non-symmetric (> 1e-10) or indefinite
/// input, and StabilityError when `require_connected` is set but more than
/// one zero mode is found.
SpectralDecomposition decompose(const Eigen::MatrixXd& laplacian, bool require_connected = false);

using ScalarMap = std::function<double(double)>;

/// K = Q diag(g(λ)) Qᵀ with g pinned to 0 on zero modes, so K𝟙 = 0 for a
/// connected graph and K commutes with L.
struct SpectralKernel {
  Eigen::VectorXd values;  // g(λ_k), 0 on zero modes
  Eigen::MatrixXd matrix;
};

/// Throws NumericError naming the eigenvalue when g is non-finite there.
SpectralKernel kernel(const SpectralDecomposition& dec, const ScalarMap& g);

/// Q diag(f(λ)) Qᵀ with f applied on every mode, zero modes included
/// (cos(τL), sin(τL), ...).
Eigen::MatrixXd matrix_function(const SpectralDecomposition& dec, const ScalarMap& f);

/// Pseudoinverse of the kernel of g: reciprocal where |g(λ_k)| exceeds
/// kSpectralRelTol * max(1, max |g|), zero elsewhere and on zero modes.
SpectralKernel kernel_pseudo_inverse(const SpectralDecomposition& dec, const ScalarMap& g);

/// L† (g = 1/λ).
Eigen::MatrixXd pseudo_inverse(const SpectralDecomposition& dec);

/// M_n = I - 𝟙𝟙ᵀ/n for a connected graph (g = 1).
Eigen::MatrixXd centering_matrix(const SpectralDecomposition& dec);

struct StabilityMargin {
  double tau_max = 0.0;  // π / (2 λ_n)
  double margin = 0.0;   // tau_max - tau
  bool stable = false;
};

/// Stability of ẋ = -L x(t - τ): requires connectivity and τ λ_n < π/2, with
/// a 1e-9 exclusion band below the boundary. Throws StabilityError for a
/// disconnected graph.
StabilityMargin stability_margin(const SpectralDecomposition& dec, double tau);

/// M_ii + M_jj - 2 M_ij. With M = L† this is the effective resistance.
double edge_quadratic_form(const Eigen::MatrixXd& m, NodeId i, NodeId j);
inline double edge_quadratic_form(const Eigen::MatrixXd& m, const Edge& e) {
  return edge_quadratic_form(m, e.i, e.j);
}

}  // namespace delaycent
