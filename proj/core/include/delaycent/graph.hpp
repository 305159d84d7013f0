#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "delaycent/errors.hpp"

namespace delaycent {

using NodeId = int;

/// An undirected link. Canonical edges satisfy i < j.
struct Edge {
  NodeId i = 0;
  NodeId j = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class GraphErrorKind {
  SelfLoop,
  DuplicateEdge,
  NonPositiveWeight,
  MalformedToken,
  NodeOutOfRange,
  InvalidHeader,
  Empty,
};

std::string_view to_string(GraphErrorKind kind);

/// Raised for any invariant violation while building or parsing a graph.
/// `line()` is the 1-based source line, or 0 when the graph did not come
/// from text.
class GraphError : public InputError {
 public:
  GraphError(GraphErrorKind kind, std::size_t line, const std::string& detail);

  GraphErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  GraphErrorKind kind_;
  std::size_t line_;
};

/// Undirected graph with strictly positive link weights over dense node ids
/// 0..n-1. Edges are stored canonically (i < j, sorted by (i, j)); that order
/// defines link indices and incidence columns everywhere downstream.
/// Immutable after construction.
class WeightedGraph {
 public:
  /// Validates and canonicalizes. Throws GraphError on self-loops, duplicate
  /// links (in either orientation), non-positive or non-finite weights and
  /// ids outside [0, n).
  static WeightedGraph from_edges(int n, std::vector<Edge> edges);

  int node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }

  /// Link index of {a, b} in either orientation.
  std::optional<std::size_t> find_edge(NodeId a, NodeId b) const;

  /// Copy with the weight of link `e` replaced.
  WeightedGraph with_weight(std::size_t e, double w) const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  WeightedGraph(int n, std::vector<Edge> edges)
      : n_(n), edges_(std::move(edges)) {}

  int n_ = 0;
  std::vector<Edge> edges_;
};

/// One data line of an edge list before id validation. Ids are kept as
/// arbitrary non-negative integers so callers can remap sparse ids.
struct RawEdge {
  std::int64_t i = 0;
  std::int64_t j = 0;
  double w = 1.0;
  std::size_t line = 0;
};

struct RawEdgeList {
  std::optional<std::int64_t> declared_n;
  std::vector<RawEdge> edges;
};

/// Tokenizes the line-oriented edge-list format:
///   # comment
///   n=<k>          optional, must precede the first edge
///   i j [w]        w defaults to 1.0
/// Rejects malformed tokens, negative ids, self-loops and non-positive
/// weights with the offending line number.
RawEdgeList parse_raw_edge_list(std::istream& in);

/// Builds a graph from a raw list whose ids are already dense. Duplicate and
/// out-of-range diagnostics name the offending line.
WeightedGraph graph_from_raw(const RawEdgeList& raw);

WeightedGraph parse_edge_list(std::istream& in);
WeightedGraph parse_edge_list(std::string_view text);

/// Edge-list text that parse_edge_list reads back to an identical graph.
std::string to_edge_list(const WeightedGraph& g);

/// {"n": int, "edges": [[i, j, w], ...]}
std::string to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(std::string_view json);

struct GraphMatrices {
  Eigen::MatrixXd laplacian;   // n x n, L = Δ - A = E W Eᵀ
  Eigen::MatrixXd incidence;   // n x |E|, +1 at the smaller id, -1 at the larger
  Eigen::VectorXd weights;     // diagonal of W, one entry per link
  Eigen::VectorXd degrees;     // diagonal of Δ (weighted degrees)
  Eigen::MatrixXd adjacency;   // n x n symmetric

  Eigen::MatrixXd weight_diag() const { return weights.asDiagonal(); }
  Eigen::MatrixXd degree_diag() const { return degrees.asDiagonal(); }
};

GraphMatrices build_matrices(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

/// Every weight multiplied by alpha > 0.
WeightedGraph scale_weights(const WeightedGraph& g, double alpha);

// Common families, all with uniform weight w.
WeightedGraph path_graph(int n, double w = 1.0);
WeightedGraph cycle_graph(int n, double w = 1.0);
WeightedGraph complete_graph(int n, double w = 1.0);
/// Node 0 is the hub; n counts the hub.
WeightedGraph star_graph(int n, double w = 1.0);

}  // namespace delaycent
