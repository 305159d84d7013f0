#include "delaycent/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace delaycent {

namespace {

Eigen::MatrixXd synthesize(const SpectralDecomposition& dec, const Eigen::VectorXd& values) {
  const Eigen::MatrixXd& q = dec.eigenvectors;
  return q * values.asDiagonal() * q.transpose();
}

void require_finite(double v, double lambda, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(12);
    os << what << " is not finite at eigenvalue " << lambda;
    throw NumericError(os.str());
  }
}

}  // namespace

SpectralDecomposition decompose(const Eigen::MatrixXd& laplacian, bool require_connected) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0) {
    throw InputError("decompose: expected a non-empty square matrix");
  }
  const double asym = (laplacian - laplacian.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream os;
    os << "decompose: matrix is not symmetric (max asymmetry " << asym << ")";
    throw InputError(os.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("decompose: eigensolver did not converge");
  }

  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.eigenvectors = solver.eigenvectors();

  const double scale = std::max(1.0, dec.max_eigenvalue());
  const double threshold = kSpectralRelTol * scale;
  if (dec.eigenvalues(0) < -threshold) {
    std::ostringstream os;
    os << "decompose: matrix is not positive semidefinite (eigenvalue " << dec.eigenvalues(0)
       << ")";
    throw InputError(os.str());
  }
  for (Eigen::Index k = 0; k < dec.size(); ++k) {
    if (dec.eigenvalues(k) < threshold) {
      dec.eigenvalues(k) = 0.0;
      ++dec.zero_mode_count;
    }
  }
  if (require_connected && dec.zero_mode_count != 1) {
    throw StabilityError("graph is disconnected (" + std::to_string(dec.zero_mode_count) +
                             " zero modes)",
                         0.0);
  }
  return dec;
}

SpectralKernel kernel(const SpectralDecomposition& dec, const ScalarMap& g) {
  SpectralKernel k;
  k.values = Eigen::VectorXd::Zero(dec.size());
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    if (dec.is_zero_mode(i)) continue;
    const double lambda = dec.eigenvalues(i);
    k.values(i) = g(lambda);
    require_finite(k.values(i), lambda, "kernel");
  }
  k.matrix = synthesize(dec, k.values);
  return k;
}

Eigen::MatrixXd matrix_function(const SpectralDecomposition& dec, const ScalarMap& f) {
  Eigen::VectorXd values(dec.size());
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    values(i) = f(dec.eigenvalues(i));
    require_finite(values(i), dec.eigenvalues(i), "matrix function");
  }
  return synthesize(dec, values);
}

SpectralKernel kernel_pseudo_inverse(const SpectralDecomposition& dec, const ScalarMap& g) {
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(dec.size());
  double largest = 0.0;
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    if (dec.is_zero_mode(i)) continue;
    raw(i) = g(dec.eigenvalues(i));
    require_finite(raw(i), dec.eigenvalues(i), "kernel");
    largest = std::max(largest, std::abs(raw(i)));
  }
  const double threshold = kSpectralRelTol * std::max(1.0, largest);
  SpectralKernel k;
  k.values = Eigen::VectorXd::Zero(dec.size());
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    if (!dec.is_zero_mode(i) && std::abs(raw(i)) > threshold) k.values(i) = 1.0 / raw(i);
  }
  k.matrix = synthesize(dec, k.values);
  return k;
}

Eigen::MatrixXd pseudo_inverse(const SpectralDecomposition& dec) {
  return kernel_pseudo_inverse(dec, [](double lambda) { return lambda; }).matrix;
}

Eigen::MatrixXd centering_matrix(const SpectralDecomposition& dec) {
  return kernel(dec, [](double) { return 1.0; }).matrix;
}

StabilityMargin stability_margin(const SpectralDecomposition& dec, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InputError("delay must be finite and non-negative");
  }
  const double lambda_max = dec.max_eigenvalue();
  if (!dec.connected()) {
    throw StabilityError("graph is disconnected; no delay is stable", 0.0);
  }
  StabilityMargin s;
  s.tau_max = std::numbers::pi / (2.0 * lambda_max);
  s.margin = s.tau_max - tau;
  s.stable = tau < s.tau_max - 1e-9;
  return s;
}

double edge_quadratic_form(const Eigen::MatrixXd& m, NodeId i, NodeId j) {
  if (i == j || i < 0 || j < 0 || i >= m.rows() || j >= m.rows() || m.rows() != m.cols()) {
    throw InputError("edge_quadratic_form: invalid link {" + std::to_string(i) + ", " +
                     std::to_string(j) + "}");
  }
  return m(i, i) + m(j, j) - 2.0 * m(i, j);
}

}  // namespace delaycent
