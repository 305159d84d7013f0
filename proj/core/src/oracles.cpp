#include "delaycent/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "delaycent/parallel.hpp"
#include "delaycent/quadrature.hpp"

namespace delaycent {

namespace {

constexpr double kDivergence = 1e8;
constexpr std::size_t kDivergenceCheckEvery = 1024;

// ---------------------------------------------------------------------------
// mode_integral

double mode_integrand(double lambda, double tau, double omega) {
  const double re = lambda * std::cos(tau * omega);
  const double im = omega - lambda * std::sin(tau * omega);
  return 1.0 / (re * re + im * im);
}

// ---------------------------------------------------------------------------
// Euler-Maruyama engine

struct StepPlan {
  std::size_t delay = 0;
  std::size_t burn = 0;
  std::size_t horizon = 0;
};

StepPlan plan_for(const SimConfig& cfg) {
  StepPlan p;
  p.delay = cfg.delay_steps();
  p.burn = static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
  p.horizon = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt)));
  return p;
}

// Noise maps are n x m, already scaled by diag(σ) √dt. All maps share the
// standard-normal stream (common random numbers). Returns, per map, the
// time averages of y_i² over the measured horizon.
std::vector<Eigen::VectorXd> run_first_order(const WeightedGraph& g,
                                             const std::vector<Eigen::MatrixXd>& noise,
                                             double dt, const StepPlan& plan,
                                             std::uint64_t seed) {
  const int n = g.node_count();
  const Eigen::Index m = noise.front().cols();
  const std::size_t slots = plan.delay + 1;
  const std::size_t configs = noise.size();

  std::vector<double> history(configs * slots * n, 0.0);
  std::vector<double> next(n);
  std::vector<double> z(m);
  std::vector<Eigen::VectorXd> acc(configs, Eigen::VectorXd::Zero(n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t total = plan.burn + plan.horizon;
  for (std::size_t k = 0; k < total; ++k) {
    for (Eigen::Index c = 0; c < m; ++c) z[c] = normal(rng);
    const std::size_t cur_slot = k % slots;
    const std::size_t lag_slot = (k + 1) % slots;  // holds x_{k-d}; receives x_{k+1}
    const bool measure = k >= plan.burn;
    const bool check = (k % kDivergenceCheckEvery) == 0;

    for (std::size_t c = 0; c < configs; ++c) {
      double* base = history.data() + c * slots * n;
      const double* cur = base + cur_slot * n;
      double* lag = base + lag_slot * n;

      std::copy(cur, cur + n, next.begin());
      for (const Edge& e : g.edges()) {
        const double flow = dt * e.w * (lag[e.i] - lag[e.j]);
        next[e.i] -= flow;
        next[e.j] += flow;
      }
      const Eigen::MatrixXd& map = noise[c];
      for (Eigen::Index col = 0; col < m; ++col) {
        const double zc = z[col];
        const double* column = map.data() + col * n;
        for (int i = 0; i < n; ++i) next[i] += column[i] * zc;
      }
      std::copy(next.begin(), next.end(), lag);

      if (measure) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += next[i];
        mean /= n;
        for (int i = 0; i < n; ++i) {
          const double y = next[i] - mean;
          acc[c](i) += y * y;
        }
      }
      if (check) {
        for (int i = 0; i < n; ++i) {
          if (!(std::abs(next[i]) <= kDivergence)) {
            throw NumericError("numerically unstable run: |x| exceeded 1e8 at step " +
                               std::to_string(k));
          }
        }
      }
    }
  }
  for (auto& a : acc) a /= static_cast<double>(plan.horizon);
  return acc;
}

Eigen::MatrixXd scaled_noise(const Eigen::MatrixXd& input, const Eigen::VectorXd& variances,
                             double dt) {
  if (variances.size() != input.cols()) {
    throw InputError("expected " + std::to_string(input.cols()) + " variances, got " +
                     std::to_string(variances.size()));
  }
  if ((variances.array() < 0.0).any() || !variances.allFinite()) {
    throw InputError("variances must be finite and non-negative");
  }
  return input * (variances.array().sqrt() * std::sqrt(dt)).matrix().asDiagonal();
}

struct MeanStdErr {
  double mean = 0.0;
  double std_err = 0.0;
};

MeanStdErr mean_std_err(const std::vector<double>& samples) {
  MeanStdErr out;
  const double count = static_cast<double>(samples.size());
  for (double s : samples) out.mean += s;
  out.mean /= count;
  if (samples.size() < 2) {
    out.std_err = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ss = 0.0;
  for (double s : samples) ss += (s - out.mean) * (s - out.mean);
  out.std_err = std::sqrt(ss / (count - 1.0) / count);
  return out;
}

WeightedGraph graph_of(const GraphMatrices& gm) {
  std::vector<Edge> edges;
  for (Eigen::Index e = 0; e < gm.incidence.cols(); ++e) {
    NodeId head = -1, tail = -1;
    for (Eigen::Index i = 0; i < gm.incidence.rows(); ++i) {
      if (gm.incidence(i, e) > 0.0) head = static_cast<NodeId>(i);
      if (gm.incidence(i, e) < 0.0) tail = static_cast<NodeId>(i);
    }
    edges.push_back({head, tail, gm.weights(e)});
  }
  return WeightedGraph::from_edges(static_cast<int>(gm.laplacian.rows()), std::move(edges));
}

}  // namespace

double mode_integral(double lambda, double tau, double abs_tol) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("mode_integral: eigenvalue must be positive");
  }
  if (!(tau >= 0.0)) throw InputError("mode_integral: delay must be non-negative");
  if (tau * lambda >= 0.5 * std::numbers::pi) {
    throw StabilityError("mode_integral diverges for tau*lambda >= pi/2",
                         0.5 * std::numbers::pi / lambda);
  }

  // For ω >= Ω >= 2λ: |1/D - 1/ω²| <= 4(2λ + λ²/Ω)/ω³, so after adding the
  // exact 1/ω² tail (2/Ω over both sides) the remainder contributes at most
  // 2(2λ + λ²/Ω)/(πΩ²) to the result.
  double cutoff = std::max(10.0 * lambda, 1.0);
  if (tau > 0.0) cutoff = std::max(cutoff, 50.0 / tau);
  auto remainder = [&](double w) {
    return 2.0 * (2.0 * lambda + lambda * lambda / w) / (std::numbers::pi * w * w);
  };
  while (remainder(cutoff) > 0.25 * abs_tol) cutoff *= 2.0;

  const std::vector<double> half = geometric_breakpoints(1e-2 * std::min(1.0, lambda), cutoff);
  std::vector<double> full;
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it > 0.0) full.push_back(-*it);
  }
  full.insert(full.end(), half.begin(), half.end());

  QuadratureOptions opts;
  opts.abs_tol = std::numbers::pi * abs_tol;  // result is divided by 2π
  const QuadratureResult q = integrate_adaptive(
      [&](double omega) { return mode_integrand(lambda, tau, omega); }, full, opts);
  return (q.value + 2.0 / cutoff) / (2.0 * std::numbers::pi);
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("delay must be non-negative");
  if (tau > 0.0 && dt > tau / 20.0) {
    throw InputError("dt must be at most tau/20 when tau > 0");
  }
  if (!(burn_in > 0.0) || !(horizon > 0.0)) {
    throw InputError("burn_in and horizon must be positive");
  }
  if (n_traj < 1) throw InputError("n_traj must be at least 1");
  if (tau > 0.0 && std::abs(tau_snapped() - tau) > 0.005 * tau) {
    throw InputError("tau is not within 0.5% of a multiple of dt");
  }
}

std::size_t SimConfig::delay_steps() const {
  return tau > 0.0 ? static_cast<std::size_t>(std::llround(tau / dt)) : 0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

SimResult simulate(const GraphMatrices& gm, const Eigen::MatrixXd& input,
                   const Eigen::VectorXd& variances, const SimConfig& cfg) {
  cfg.validate();
  if (input.rows() != gm.laplacian.rows()) {
    throw InputError("input matrix must have one row per node");
  }
  const WeightedGraph g = graph_of(gm);
  const StepPlan plan = plan_for(cfg);
  const std::vector<Eigen::MatrixXd> noise{scaled_noise(input, variances, cfg.dt)};

  std::vector<Eigen::VectorXd> per_traj(cfg.n_traj);
  parallel_for(
      static_cast<std::size_t>(cfg.n_traj),
      [&](std::size_t t) {
        per_traj[t] = run_first_order(g, noise, cfg.dt, plan, trajectory_seed(cfg.seed, t))[0];
      },
      cfg.threads);

  SimResult r;
  r.config = cfg;
  r.delay_steps = plan.delay;
  r.tau_snapped = cfg.tau_snapped();
  r.effective_samples = static_cast<std::size_t>(cfg.n_traj);
  r.per_node_var = Eigen::VectorXd::Zero(g.node_count());
  std::vector<double> totals;
  totals.reserve(per_traj.size());
  for (const Eigen::VectorXd& v : per_traj) {
    r.per_node_var += v;
    totals.push_back(v.sum());
  }
  r.per_node_var /= static_cast<double>(cfg.n_traj);
  const MeanStdErr stats = mean_std_err(totals);
  r.rho_hat = stats.mean;
  r.std_err = stats.std_err;
  return r;
}

McCentrality mc_node_centrality(const ConsensusNetwork& net, const NoiseStructure& s,
                                const SimConfig& cfg, double delta) {
  cfg.validate();
  if (!(delta > 0.0) || !(delta <= 1.0)) throw InputError("delta must lie in (0, 1]");
  if (s.domain() != ChannelDomain::Nodes) {
    throw InputError("Monte Carlo node centrality needs an agent noise structure");
  }
  net.require_stable(cfg.tau_snapped());
  const Eigen::MatrixXd input = input_matrix(net.matrices(), s);
  const int n = net.node_count();
  if (input.cols() != n) throw InputError("expected one noise channel per agent");

  std::vector<Eigen::MatrixXd> noise;
  noise.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd var = Eigen::VectorXd::Ones(n);
      var(i) = 1.0 + sign * delta;
      noise.push_back(scaled_noise(input, var, cfg.dt));
    }
  }

  const StepPlan plan = plan_for(cfg);
  std::vector<Eigen::VectorXd> per_traj(cfg.n_traj);
  parallel_for(
      static_cast<std::size_t>(cfg.n_traj),
      [&](std::size_t t) {
        const auto acc =
            run_first_order(net.graph(), noise, cfg.dt, plan, trajectory_seed(cfg.seed, t));
        Eigen::VectorXd eta(n);
        for (int i = 0; i < n; ++i) {
          eta(i) = (acc[2 * i].sum() - acc[2 * i + 1].sum()) / (2.0 * delta);
        }
        per_traj[t] = std::move(eta);
      },
      cfg.threads);

  McCentrality out;
  out.eta_hat.resize(n);
  out.std_err.resize(n);
  out.tau_snapped = cfg.tau_snapped();
  for (int i = 0; i < n; ++i) {
    std::vector<double> samples;
    samples.reserve(per_traj.size());
    for (const auto& v : per_traj) samples.push_back(v(i));
    const MeanStdErr stats = mean_std_err(samples);
    out.eta_hat(i) = stats.mean;
    out.std_err(i) = stats.std_err;
  }
  return out;
}

SimResult simulate_second_order(const GraphMatrices& gm, const Eigen::VectorXd& variances,
                                double b, const SimConfig& cfg) {
  cfg.validate();
  if (!(b > 0.0)) throw InputError("second-order gain b must be positive");
  const WeightedGraph g = graph_of(gm);
  const int n = g.node_count();
  const Eigen::MatrixXd noise =
      scaled_noise(Eigen::MatrixXd::Identity(n, n), variances, cfg.dt);
  const StepPlan plan = plan_for(cfg);
  const std::size_t slots = plan.delay + 1;
  const double dt = cfg.dt;

  std::vector<Eigen::VectorXd> per_traj(cfg.n_traj);
  parallel_for(
      static_cast<std::size_t>(cfg.n_traj),
      [&](std::size_t t) {
        std::vector<double> xs(slots * n, 0.0), vs(slots * n, 0.0);
        std::vector<double> x_next(n), v_next(n);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        std::mt19937_64 rng(trajectory_seed(cfg.seed, t));
        std::normal_distribution<double> normal(0.0, 1.0);

        const std::size_t total = plan.burn + plan.horizon;
        for (std::size_t k = 0; k < total; ++k) {
          const std::size_t cur = (k % slots) * n;
          const std::size_t lag = ((k + 1) % slots) * n;
          for (int i = 0; i < n; ++i) {
            x_next[i] = xs[cur + i] + dt * vs[cur + i];
            v_next[i] = vs[cur + i] + noise(i, i) * normal(rng);
          }
          for (const Edge& e : g.edges()) {
            const double flow =
                dt * e.w *
                ((xs[lag + e.i] - xs[lag + e.j]) + b * (vs[lag + e.i] - vs[lag + e.j]));
            v_next[e.i] -= flow;
            v_next[e.j] += flow;
          }
          std::copy(x_next.begin(), x_next.end(), xs.begin() + lag);
          std::copy(v_next.begin(), v_next.end(), vs.begin() + lag);

          if (k >= plan.burn) {
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += x_next[i];
            mean /= n;
            for (int i = 0; i < n; ++i) acc(i) += (x_next[i] - mean) * (x_next[i] - mean);
          }
          if (k % kDivergenceCheckEvery == 0) {
            for (int i = 0; i < n; ++i) {
              if (!(std::abs(x_next[i] - x_next[0]) <= kDivergence) ||
                  !(std::abs(v_next[i]) <= kDivergence)) {
                throw NumericError("numerically unstable run at step " + std::to_string(k));
              }
            }
          }
        }
        per_traj[t] = acc / static_cast<double>(plan.horizon);
      },
      cfg.threads);

  SimResult r;
  r.config = cfg;
  r.delay_steps = plan.delay;
  r.tau_snapped = cfg.tau_snapped();
  r.effective_samples = static_cast<std::size_t>(cfg.n_traj);
  r.per_node_var = Eigen::VectorXd::Zero(n);
  std::vector<double> totals;
  for (const Eigen::VectorXd& v : per_traj) {
    r.per_node_var += v;
    totals.push_back(v.sum());
  }
  r.per_node_var /= static_cast<double>(cfg.n_traj);
  const MeanStdErr stats = mean_std_err(totals);
  r.rho_hat = stats.mean;
  r.std_err = stats.std_err;
  return r;
}

}  // namespace delaycent
