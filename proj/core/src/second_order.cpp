#include "delaycent/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "delaycent/parallel.hpp"
#include "delaycent/quadrature.hpp"

namespace delaycent {

void SecondOrderConfig::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) throw InputError("second-order gain b must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("delay must be non-negative");
  if (!(quad_tol > 0.0)) throw InputError("quadrature tolerance must be positive");
  if (max_panels < 16) throw InputError("panel budget must be at least 16");
}

double h_kernel(double lambda, double tau, double b, double omega) {
  const double w2 = omega * omega;
  const double re = lambda - w2 * std::cos(omega * tau);
  const double im = b * lambda - omega * std::sin(omega * tau);
  return re * re + w2 * im * im;
}

double f_integral(double lambda, const SecondOrderConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("f_integral: eigenvalue must be positive");
  }
  const double b = cfg.b;
  const double tau = cfg.tau;

  // Past Ω with 2bλ/Ω + 2λ/Ω² <= 1/2 we have h >= ω⁴/2, so the one-sided
  // tail of 1/h is at most 2/(3Ω³) and contributes at most 2/(3πΩ³) to f.
  double cutoff = std::max(10.0 * lambda * (1.0 + b), cfg.min_cutoff);
  if (tau > 0.0) cutoff = std::max(cutoff, 50.0 / tau);
  auto tail_ok = [&](double w) {
    return 2.0 * b * lambda / w + 2.0 * lambda / (w * w) <= 0.5 &&
           2.0 / (3.0 * std::numbers::pi * w * w * w) < 0.5 * cfg.quad_tol;
  };
  while (!tail_ok(cutoff)) cutoff *= 2.0;

  const double scale = lambda * lambda;
  double min_h = std::numeric_limits<double>::infinity();
  auto integrand = [&](double omega) {
    const double h = h_kernel(lambda, tau, b, omega);
    min_h = std::min(min_h, h);
    return 1.0 / h;
  };

  std::vector<double> half = geometric_breakpoints(1e-2 * std::min(1.0, std::sqrt(lambda)), cutoff);
  const double peak = std::sqrt(lambda);
  if (std::find(half.begin(), half.end(), peak) == half.end() && peak < cutoff) {
    half.insert(std::upper_bound(half.begin(), half.end(), peak), peak);
  }

  QuadratureOptions opts;
  opts.max_panels = cfg.max_panels;
  double value = 0.0;
  if (cfg.exploit_symmetry) {
    opts.abs_tol = 0.5 * std::numbers::pi * cfg.quad_tol;
    value = integrate_adaptive(integrand, half, opts).value / std::numbers::pi;
  } else {
    std::vector<double> full;
    full.reserve(2 * half.size() - 1);
    for (auto it = half.rbegin(); it != half.rend(); ++it) {
      if (*it > 0.0) full.push_back(-*it);
    }
    full.insert(full.end(), half.begin(), half.end());
    opts.abs_tol = std::numbers::pi * cfg.quad_tol;
    value = integrate_adaptive(integrand, full, opts).value / (2.0 * std::numbers::pi);
  }

  if (min_h < 1e-12 * scale) {
    std::ostringstream os;
    os.precision(12);
    os << "marginal/unstable configuration: h(lambda=" << lambda << ", tau=" << tau
       << ", b=" << b << ", omega) nearly vanishes (min " << min_h << ")";
    throw NumericError(os.str());
  }
  return value;
}

CentralityReport so_node_centrality(const ConsensusNetwork& net, const SecondOrderConfig& cfg) {
  cfg.validate();
  const SpectralDecomposition& dec = net.spectrum();
  if (!dec.connected()) {
    throw StabilityError("graph is disconnected; second-order indices are undefined", 0.0);
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(dec.size());
  parallel_for(static_cast<std::size_t>(dec.size()), [&](std::size_t k) {
    const auto j = static_cast<Eigen::Index>(k);
    if (dec.is_zero_mode(j)) return;
    try {
      f(j) = f_integral(dec.eigenvalues(j), cfg);
    } catch (const NumericError& e) {
      std::ostringstream os;
      os.precision(12);
      os << "eigenvalue " << dec.eigenvalues(j) << ": " << e.what();
      throw NumericError(os.str());
    }
  });

  Eigen::VectorXd eta = dec.eigenvectors.array().square().matrix() * f;
  StabilityMargin unknown;
  unknown.tau_max = std::numeric_limits<double>::quiet_NaN();
  unknown.margin = std::numeric_limits<double>::quiet_NaN();
  unknown.stable = true;
  CentralityReport r = make_report(std::move(eta), cfg.tau, "second-order-dynamics",
                                   ChannelDomain::Nodes, unknown);
  r.extras = {{"b", cfg.b}, {"quad_tol", cfg.quad_tol}};
  return r;
}

Eigen::VectorXd so_zero_delay_closed_form(const ConsensusNetwork& net, double b) {
  if (!(b > 0.0)) throw InputError("second-order gain b must be positive");
  if (!net.connected()) {
    throw StabilityError("graph is disconnected; second-order indices are undefined", 0.0);
  }
  const SpectralKernel inv_sq =
      kernel(net.spectrum(), [](double lambda) { return 1.0 / (lambda * lambda); });
  return inv_sq.matrix.diagonal() / (2.0 * b);
}

}  // namespace delaycent
