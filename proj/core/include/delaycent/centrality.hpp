#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "delaycent/graph.hpp"
#include "delaycent/ranking.hpp"
#include "delaycent/spectral.hpp"

namespace delaycent {

/// Where the noise enters. Agent structures index channels by node, link
/// structures by link.
enum class StructureTag {
  Dynamics,     // B = I
  Sensor,       // B = L
  Receiver,     // B = Δ
  Emitter,      // B = A
  CommChannel,  // B = E W
  Measurement,  // B = -E
  Custom,
};

enum class ChannelDomain { Nodes, Links };

std::string_view to_string(StructureTag tag);
/// Accepts the names produced by to_string ("dynamics", "comm-channel", ...).
std::optional<StructureTag> parse_structure_tag(std::string_view name);

class NoiseStructure {
 public:
  NoiseStructure() = default;
  explicit NoiseStructure(StructureTag tag);

  static NoiseStructure dynamics() { return NoiseStructure(StructureTag::Dynamics); }
  static NoiseStructure sensor() { return NoiseStructure(StructureTag::Sensor); }
  static NoiseStructure receiver() { return NoiseStructure(StructureTag::Receiver); }
  static NoiseStructure emitter() { return NoiseStructure(StructureTag::Emitter); }
  static NoiseStructure comm_channel() { return NoiseStructure(StructureTag::CommChannel); }
  static NoiseStructure measurement() { return NoiseStructure(StructureTag::Measurement); }
  /// Explicit n x m input matrix; `domain` says whether columns are nodes or
  /// links (which decides node vs link centrality).
  static NoiseStructure custom(Eigen::MatrixXd input, ChannelDomain domain);

  StructureTag tag() const noexcept { return tag_; }
  ChannelDomain domain() const noexcept { return domain_; }
  const Eigen::MatrixXd& custom_input() const noexcept { return custom_; }

 private:
  StructureTag tag_ = StructureTag::Dynamics;
  ChannelDomain domain_ = ChannelDomain::Nodes;
  Eigen::MatrixXd custom_;
};

/// The six named structures, in declaration order.
std::vector<NoiseStructure> standard_structures();

struct NoiseSpec {
  NoiseStructure structure;
  /// One non-negative variance per channel. Absent means all ones.
  std::optional<Eigen::VectorXd> variances;
};

/// Graph, derived matrices and Laplacian spectrum, computed once.
class ConsensusNetwork {
 public:
  explicit ConsensusNetwork(WeightedGraph graph);

  const WeightedGraph& graph() const noexcept { return graph_; }
  const GraphMatrices& matrices() const noexcept { return matrices_; }
  const SpectralDecomposition& spectrum() const noexcept { return spectrum_; }
  int node_count() const noexcept { return graph_.node_count(); }
  bool connected() const noexcept { return spectrum_.connected(); }

  StabilityMargin stability(double tau) const { return stability_margin(spectrum_, tau); }
  /// Throws StabilityError (message carries τ_max) unless τ is strictly stable.
  StabilityMargin require_stable(double tau) const;

 private:
  WeightedGraph graph_;
  GraphMatrices matrices_;
  SpectralDecomposition spectrum_;
};

/// Per-mode squared H2 norm of ẋ = -λ x(t - τ) + ξ:
/// cos(λτ) / (2λ (1 - sin(λτ))).
double mode_h2_norm(double lambda, double tau);

/// Index kernel g(λ) = cos(τλ) / (λ (1 - sin τλ)); its spectral matrix is
/// L† cos(τL) (M_n - sin τL)†.
SpectralKernel delay_kernel(const SpectralDecomposition& dec, double tau);

Eigen::MatrixXd input_matrix(const GraphMatrices& gm, const NoiseStructure& s);
Eigen::Index channel_count(const ConsensusNetwork& net, const NoiseStructure& s);

/// Steady-state dispersion ρ_ss = Σ_{k≥2} b_k cos(λ_kτ) / (2λ_k(1 - sin λ_kτ)),
/// b_k = [Qᵀ B diag(σ²) Bᵀ Q]_kk.
double performance(const ConsensusNetwork& net, const NoiseSpec& spec, double tau);

struct CentralityReport {
  double tau = 0.0;
  std::string structure;
  ChannelDomain domain = ChannelDomain::Nodes;
  Eigen::VectorXd indices;
  std::vector<int> ranking;
  std::vector<std::vector<int>> tie_groups;
  double tau_max = 0.0;
  double margin = 0.0;
  /// Structure-specific metadata serialized alongside (e.g. b, quad_tol).
  std::vector<std::pair<std::string, double>> extras;
};

CentralityReport make_report(Eigen::VectorXd indices, double tau, std::string structure,
                             ChannelDomain domain, const StabilityMargin& stability);

/// ½ diag(Bᵀ K B) with K = delay_kernel: the index of every noise channel of
/// an arbitrary input matrix.
Eigen::VectorXd generic_indices(const ConsensusNetwork& net, const Eigen::MatrixXd& input,
                                double tau);

/// η over nodes. Dynamics, Sensor and Receiver use their closed forms;
/// Emitter and Custom use generic_indices.
CentralityReport node_centrality(const ConsensusNetwork& net, const NoiseStructure& s, double tau);

/// ν over links: ½ w_e^p r_e(K), p = 2 for CommChannel, 0 for Measurement;
/// Custom link structures use generic_indices.
CentralityReport link_centrality(const ConsensusNetwork& net, const NoiseStructure& s, double tau);

/// Dispatches on the structure's channel domain.
CentralityReport centrality(const ConsensusNetwork& net, const NoiseStructure& s, double tau);

/// The simplified emitter display ½ diag((Δ²L† - Δ + L) cos(τL)(M_n - sin τL)†).
/// Kept for diagnostics only; it differs from the exact emitter index by
/// ½ d_i [cos(τL)(M_n - sin τL)†]_ii.
Eigen::VectorXd emitter_display_indices(const ConsensusNetwork& net, double tau);

/// κ_e = ∂ρ_ss/∂w_e under unit variances, for Dynamics or Sensor noise.
Eigen::VectorXd link_sensitivity(const ConsensusNetwork& net, const NoiseStructure& s, double tau);

struct RankFlip {
  double tau_from = 0.0;
  double tau_to = 0.0;
  int first = 0;   // ahead at tau_from
  int second = 0;  // ahead at tau_to
};

struct TauSweep {
  std::vector<CentralityReport> reports;
  std::vector<RankFlip> flips;
};

/// One report per grid value (strictly increasing, all stable) plus every
/// pair whose strict order reverses between consecutive grid points.
TauSweep tau_sweep(const ConsensusNetwork& net, const NoiseStructure& s,
                   std::span<const double> taus);

struct ScaleSweep {
  std::vector<double> alphas;
  std::vector<CentralityReport> reports;
  std::vector<int> reference_ranking;       // unscaled graph at τ = 0
  std::vector<bool> matches_reference;      // per alpha
};

/// Reports for the graph with weights scaled by each alpha at a fixed delay.
ScaleSweep scale_sweep(const ConsensusNetwork& net, const NoiseStructure& s, double tau,
                       std::span<const double> alphas);

struct AdversarialAllocation {
  Eigen::VectorXd variances;  // n at one maximal-index node, 0 elsewhere
  int target = 0;
  double worst_performance = 0.0;  // n * max η
};

/// Worst-case placement of total noise power n over agents.
AdversarialAllocation adversarial_allocation(const ConsensusNetwork& net, const NoiseStructure& s,
                                             double tau);

}  // namespace delaycent
