#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "delaycent/centrality.hpp"
#include "delaycent/oracles.hpp"

namespace delaycent {

/// Significant digits of every serialized number.
inline constexpr int kReportDigits = 12;

/// Rounds to kReportDigits significant digits (what the writers emit).
double round_report(double x);

/// Internal id -> external id. Empty means identity.
using IdLabels = std::vector<std::int64_t>;

/// Rank of each channel: 1 + position in the ranking, tied channels share the
/// best rank of their group.
std::vector<int> rank_positions(const CentralityReport& r);

/// {tau, structure, indices, ranking, tie_groups, tau_max, margin, ...extras}
/// plus "nodes" (node reports) or "links" (link reports, [u, v] pairs) in
/// external ids. Non-finite numbers are written as null.
std::string report_json(const CentralityReport& r, const WeightedGraph& g,
                        const IdLabels& labels = {});

/// Node reports: id,index,rank. Link reports: u,v,index,rank.
std::string report_csv(const CentralityReport& r, const WeightedGraph& g,
                       const IdLabels& labels = {});

std::string tau_sweep_json(const TauSweep& sweep, const WeightedGraph& g,
                           const IdLabels& labels = {});
std::string scale_sweep_json(const ScaleSweep& sweep, const WeightedGraph& g,
                             const IdLabels& labels = {});

/// Streams one row per (grid value, channel): grid,id,index,rank. Link
/// channels are written as "u-v".
class SweepCsvWriter {
 public:
  SweepCsvWriter(std::ostream& out, const WeightedGraph& g, IdLabels labels = {});
  void write(double grid, const CentralityReport& r);

 private:
  std::ostream& out_;
  const WeightedGraph& graph_;
  IdLabels labels_;
};

/// {rho_hat, std_err, per_node_var, tau_snapped, config}
std::string sim_json(const SimResult& r, const IdLabels& labels = {});

/// Shortest decimal form of round_report(x); "nan"/"inf" for non-finite.
std::string format_number(double x);

}  // namespace delaycent
