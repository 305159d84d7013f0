#include "delaycent/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaycent/parallel.hpp"

namespace delaycent {

namespace {

bool is_agent_structure(const NoiseStructure& s) { return s.domain() == ChannelDomain::Nodes; }

std::string describe_unstable(double tau, const StabilityMargin& m) {
  std::ostringstream os;
  os.precision(12);
  os << "delay tau=" << tau << " is outside the stability region (tau_max=" << m.tau_max << ")";
  return os.str();
}

Eigen::VectorXd edge_forms(const WeightedGraph& g, const Eigen::MatrixXd& m, int weight_power) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.edge_count()));
  Eigen::Index k = 0;
  for (const Edge& e : g.edges()) {
    out(k++) = 0.5 * std::pow(e.w, weight_power) * edge_quadratic_form(m, e);
  }
  return out;
}

}  // namespace

std::string_view to_string(StructureTag tag) {
  switch (tag) {
    case StructureTag::Dynamics: return "dynamics";
    case StructureTag::Sensor: return "sensor";
    case StructureTag::Receiver: return "receiver";
    case StructureTag::Emitter: return "emitter";
    case StructureTag::CommChannel: return "comm-channel";
    case StructureTag::Measurement: return "measurement";
    case StructureTag::Custom: return "custom";
  }
  return "unknown";
}

std::optional<StructureTag> parse_structure_tag(std::string_view name) {
  for (auto tag : {StructureTag::Dynamics, StructureTag::Sensor, StructureTag::Receiver,
                   StructureTag::Emitter, StructureTag::CommChannel, StructureTag::Measurement,
                   StructureTag::Custom}) {
    if (name == to_string(tag)) return tag;
  }
  return std::nullopt;
}

NoiseStructure::NoiseStructure(StructureTag tag) : tag_(tag) {
  if (tag == StructureTag::Custom) {
    throw InputError("custom noise structures need an input matrix");
  }
  domain_ = (tag == StructureTag::CommChannel || tag == StructureTag::Measurement)
                ? ChannelDomain::Links
                : ChannelDomain::Nodes;
}

NoiseStructure NoiseStructure::custom(Eigen::MatrixXd input, ChannelDomain domain) {
  NoiseStructure s;
  s.tag_ = StructureTag::Custom;
  s.domain_ = domain;
  s.custom_ = std::move(input);
  return s;
}

std::vector<NoiseStructure> standard_structures() {
  return {NoiseStructure::dynamics(), NoiseStructure::sensor(),
          NoiseStructure::receiver(), NoiseStructure::emitter(),
          NoiseStructure::comm_channel(), NoiseStructure::measurement()};
}

ConsensusNetwork::ConsensusNetwork(WeightedGraph graph)
    : graph_(std::move(graph)),
      matrices_(build_matrices(graph_)),
      spectrum_(decompose(matrices_.laplacian)) {}

StabilityMargin ConsensusNetwork::require_stable(double tau) const {
  StabilityMargin m = stability(tau);
  if (!m.stable) throw StabilityError(describe_unstable(tau, m), m.tau_max);
  return m;
}

double mode_h2_norm(double lambda, double tau) {
  const double x = lambda * tau;
  return std::cos(x) / (2.0 * lambda * (1.0 - std::sin(x)));
}

SpectralKernel delay_kernel(const SpectralDecomposition& dec, double tau) {
  return kernel(dec, [tau](double lambda) {
    const double x = tau * lambda;
    return std::cos(x) / (lambda * (1.0 - std::sin(x)));
  });
}

Eigen::MatrixXd input_matrix(const GraphMatrices& gm, const NoiseStructure& s) {
  switch (s.tag()) {
    case StructureTag::Dynamics:
      return Eigen::MatrixXd::Identity(gm.laplacian.rows(), gm.laplacian.cols());
    case StructureTag::Sensor: return gm.laplacian;
    case StructureTag::Receiver: return gm.degree_diag();
    case StructureTag::Emitter: return gm.adjacency;
    case StructureTag::CommChannel: return gm.incidence * gm.weights.asDiagonal();
    case StructureTag::Measurement: return -gm.incidence;
    case StructureTag::Custom:
      if (s.custom_input().rows() != gm.laplacian.rows()) {
        throw InputError("custom input matrix has " + std::to_string(s.custom_input().rows()) +
                         " rows, expected " + std::to_string(gm.laplacian.rows()));
      }
      return s.custom_input();
  }
  throw InputError("unknown noise structure");
}

Eigen::Index channel_count(const ConsensusNetwork& net, const NoiseStructure& s) {
  switch (s.tag()) {
    case StructureTag::CommChannel:
    case StructureTag::Measurement:
      return static_cast<Eigen::Index>(net.graph().edge_count());
    case StructureTag::Custom: return s.custom_input().cols();
    default: return net.node_count();
  }
}

double performance(const ConsensusNetwork& net, const NoiseSpec& spec, double tau) {
  net.require_stable(tau);
  const Eigen::MatrixXd b = input_matrix(net.matrices(), spec.structure);
  Eigen::VectorXd var = spec.variances.value_or(Eigen::VectorXd::Ones(b.cols()));
  if (var.size() != b.cols()) {
    throw InputError("expected " + std::to_string(b.cols()) + " variances, got " +
                     std::to_string(var.size()));
  }
  if ((var.array() < 0.0).any() || !var.allFinite()) {
    throw InputError("variances must be finite and non-negative");
  }

  const SpectralDecomposition& dec = net.spectrum();
  const Eigen::MatrixXd projected = dec.eigenvectors.transpose() * b;  // Qᵀ B
  double rho = 0.0;
  for (Eigen::Index k = 0; k < dec.size(); ++k) {
    if (dec.is_zero_mode(k)) continue;
    const double bk = (projected.row(k).array().square() * var.transpose().array()).sum();
    rho += bk * mode_h2_norm(dec.eigenvalues(k), tau);
  }
  return rho;
}

CentralityReport make_report(Eigen::VectorXd indices, double tau, std::string structure,
                             ChannelDomain domain, const StabilityMargin& stability) {
  CentralityReport r;
  r.tau = tau;
  r.structure = std::move(structure);
  r.domain = domain;
  Ranking ranking = rank_indices(indices);
  r.indices = std::move(indices);
  r.ranking = std::move(ranking.order);
  r.tie_groups = std::move(ranking.tie_groups);
  r.tau_max = stability.tau_max;
  r.margin = stability.margin;
  return r;
}

Eigen::VectorXd generic_indices(const ConsensusNetwork& net, const Eigen::MatrixXd& input,
                                double tau) {
  net.require_stable(tau);
  if (input.rows() != net.node_count()) {
    throw InputError("input matrix must have one row per node");
  }
  const Eigen::MatrixXd k = delay_kernel(net.spectrum(), tau).matrix;
  return 0.5 * (input.transpose() * k * input).diagonal();
}

CentralityReport node_centrality(const ConsensusNetwork& net, const NoiseStructure& s,
                                 double tau) {
  if (!is_agent_structure(s)) {
    throw InputError("node centrality needs an agent noise structure, got " +
                     std::string(to_string(s.tag())));
  }
  const StabilityMargin stab = net.require_stable(tau);
  const SpectralDecomposition& dec = net.spectrum();

  Eigen::VectorXd eta;
  switch (s.tag()) {
    case StructureTag::Dynamics:
      eta = 0.5 * delay_kernel(dec, tau).matrix.diagonal();
      break;
    case StructureTag::Sensor:
      // ½ [L cos(τL) (M_n - sin τL)†]_ii
      eta = 0.5 * kernel(dec, [tau](double lambda) {
                    const double x = tau * lambda;
                    return lambda * std::cos(x) / (1.0 - std::sin(x));
                  }).matrix.diagonal();
      break;
    case StructureTag::Receiver: {
      const Eigen::VectorXd& d = net.matrices().degrees;
      eta = 0.5 * d.array().square() * delay_kernel(dec, tau).matrix.diagonal().array();
      break;
    }
    default:
      eta = generic_indices(net, input_matrix(net.matrices(), s), tau);
      break;
  }
  return make_report(std::move(eta), tau, std::string(to_string(s.tag())), ChannelDomain::Nodes,
                     stab);
}

CentralityReport link_centrality(const ConsensusNetwork& net, const NoiseStructure& s,
                                 double tau) {
  if (is_agent_structure(s)) {
    throw InputError("link centrality needs a link noise structure, got " +
                     std::string(to_string(s.tag())));
  }
  const StabilityMargin stab = net.require_stable(tau);
  Eigen::VectorXd nu;
  switch (s.tag()) {
    case StructureTag::CommChannel:
      nu = edge_forms(net.graph(), delay_kernel(net.spectrum(), tau).matrix, 2);
      break;
    case StructureTag::Measurement:
      nu = edge_forms(net.graph(), delay_kernel(net.spectrum(), tau).matrix, 0);
      break;
    default:
      nu = generic_indices(net, input_matrix(net.matrices(), s), tau);
      break;
  }
  return make_report(std::move(nu), tau, std::string(to_string(s.tag())), ChannelDomain::Links,
                     stab);
}

CentralityReport centrality(const ConsensusNetwork& net, const NoiseStructure& s, double tau) {
  return is_agent_structure(s) ? node_centrality(net, s, tau) : link_centrality(net, s, tau);
}

Eigen::VectorXd emitter_display_indices(const ConsensusNetwork& net, double tau) {
  net.require_stable(tau);
  const SpectralDecomposition& dec = net.spectrum();
  const Eigen::MatrixXd k = delay_kernel(dec, tau).matrix;
  // cos(τL)(M_n - sin τL)† and L cos(τL)(M_n - sin τL)†
  const Eigen::MatrixXd p = kernel(dec, [tau](double lambda) {
                              const double x = tau * lambda;
                              return std::cos(x) / (1.0 - std::sin(x));
                            }).matrix;
  const Eigen::MatrixXd lp = net.matrices().laplacian * p;
  const Eigen::ArrayXd d = net.matrices().degrees.array();
  return 0.5 * (d.square() * k.diagonal().array() - d * p.diagonal().array() +
                lp.diagonal().array())
                   .matrix();
}

Eigen::VectorXd link_sensitivity(const ConsensusNetwork& net, const NoiseStructure& s,
                                 double tau) {
  net.require_stable(tau);
  ScalarMap derivative;
  switch (s.tag()) {
    case StructureTag::Dynamics:
      derivative = [tau](double lambda) {
        const double x = tau * lambda;
        return (x - std::cos(x)) / (lambda * lambda * (1.0 - std::sin(x)));
      };
      break;
    case StructureTag::Sensor:
      derivative = [tau](double lambda) {
        const double x = tau * lambda;
        return (x + std::cos(x)) / (1.0 - std::sin(x));
      };
      break;
    default:
      throw InputError("link sensitivity is defined for dynamics and sensor noise, got " +
                       std::string(to_string(s.tag())));
  }
  return edge_forms(net.graph(), kernel(net.spectrum(), derivative).matrix, 0);
}

TauSweep tau_sweep(const ConsensusNetwork& net, const NoiseStructure& s,
                   std::span<const double> taus) {
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (k > 0 && !(taus[k] > taus[k - 1])) {
      throw InputError("delay grid must be strictly increasing");
    }
    net.require_stable(taus[k]);
  }

  TauSweep sweep;
  sweep.reports.resize(taus.size());
  parallel_for(taus.size(), [&](std::size_t k) { sweep.reports[k] = centrality(net, s, taus[k]); });

  for (std::size_t k = 1; k < sweep.reports.size(); ++k) {
    const Eigen::VectorXd& before = sweep.reports[k - 1].indices;
    const Eigen::VectorXd& after = sweep.reports[k].indices;
    for (int a = 0; a < before.size(); ++a) {
      for (int b = a + 1; b < before.size(); ++b) {
        const int s0 = compare_ranked(before, a, b);
        const int s1 = compare_ranked(after, a, b);
        if (s0 * s1 == -1) {
          sweep.flips.push_back({taus[k - 1], taus[k], s0 > 0 ? a : b, s0 > 0 ? b : a});
        }
      }
    }
  }
  return sweep;
}

ScaleSweep scale_sweep(const ConsensusNetwork& net, const NoiseStructure& s, double tau,
                       std::span<const double> alphas) {
  std::vector<ConsensusNetwork> scaled;
  scaled.reserve(alphas.size());
  for (double alpha : alphas) {
    scaled.emplace_back(scale_weights(net.graph(), alpha));
    scaled.back().require_stable(tau);
  }

  ScaleSweep sweep;
  sweep.alphas.assign(alphas.begin(), alphas.end());
  sweep.reference_ranking = centrality(net, s, 0.0).ranking;
  sweep.reports.resize(alphas.size());
  parallel_for(alphas.size(),
               [&](std::size_t k) { sweep.reports[k] = centrality(scaled[k], s, tau); });
  for (const CentralityReport& r : sweep.reports) {
    sweep.matches_reference.push_back(r.ranking == sweep.reference_ranking);
  }
  return sweep;
}

AdversarialAllocation adversarial_allocation(const ConsensusNetwork& net, const NoiseStructure& s,
                                             double tau) {
  const CentralityReport report = node_centrality(net, s, tau);
  const int n = net.node_count();
  if (report.indices.size() != n) {
    throw InputError("adversarial allocation needs one noise channel per agent");
  }
  AdversarialAllocation out;
  report.indices.maxCoeff(&out.target);
  out.variances = Eigen::VectorXd::Zero(n);
  out.variances(out.target) = n;
  out.worst_performance = n * report.indices(out.target);

  const double check = performance(net, NoiseSpec{s, out.variances}, tau);
  if (std::abs(check - out.worst_performance) > 1e-10 * std::max(1.0, std::abs(check))) {
    std::ostringstream os;
    os.precision(17);
    os << "adversarial allocation: n*max(eta)=" << out.worst_performance
       << " disagrees with performance " << check;
    throw NumericError(os.str());
  }
  return out;
}

}  // namespace delaycent
