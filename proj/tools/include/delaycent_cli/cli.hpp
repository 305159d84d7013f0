#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delaycent/graph.hpp"
#include "delaycent/report.hpp"

namespace delaycent::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kUnstable = 3,
  kNumeric = 4,
};

struct RemappedGraph {
  WeightedGraph graph;
  IdLabels labels;        // internal -> original; empty for identity
};

/// Dense relabelling of arbitrary non-negative ids (sorted ascending). Lists
/// with an n= header, or whose ids are already 0..max, keep the identity.
RemappedGraph remap_node_ids(const RawEdgeList& raw);

/// {"<original>": internal, ...} in ascending original id.
std::string id_map_json(const RemappedGraph& g);

/// Entry point minus argv[0]. Data goes to `out` (or --output), diagnostics
/// to `err`. Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace delaycent::cli
