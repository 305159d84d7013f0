#include "delaycent/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace delaycent {

namespace {

std::string line_prefix(std::size_t line) {
  return line == 0 ? std::string{} : "line " + std::to_string(line) + ": ";
}

bool parse_int(std::string_view tok, std::int64_t& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_double(std::string_view tok, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

// Shared by from_edges and graph_from_raw; `lines` is empty or parallel to
// `edges`.
WeightedGraph validate(int n, std::vector<Edge> edges,
                       std::vector<std::size_t> lines,
                       WeightedGraph (*make)(int, std::vector<Edge>)) {
  if (n <= 0) {
    throw GraphError(GraphErrorKind::Empty, 0, "graph has no nodes");
  }
  const bool have_lines = lines.size() == edges.size();
  auto line_of = [&](std::size_t k) { return have_lines ? lines[k] : 0; };

  for (std::size_t k = 0; k < edges.size(); ++k) {
    Edge& e = edges[k];
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw GraphError(GraphErrorKind::NodeOutOfRange, line_of(k),
                       "node id outside [0, " + std::to_string(n) + ") in link (" +
                           std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
    }
    if (e.i == e.j) {
      throw GraphError(GraphErrorKind::SelfLoop, line_of(k),
                       "self-loop at node " + std::to_string(e.i));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw GraphError(GraphErrorKind::NonPositiveWeight, line_of(k),
                       "weight must be finite and positive");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }

  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(edges[a].i, edges[a].j) < std::pair(edges[b].i, edges[b].j);
  });

  std::vector<Edge> sorted;
  sorted.reserve(edges.size());
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const Edge& e = edges[order[idx]];
    if (!sorted.empty() && sorted.back().i == e.i && sorted.back().j == e.j) {
      throw GraphError(GraphErrorKind::DuplicateEdge, line_of(order[idx]),
                       "duplicate link {" + std::to_string(e.i) + ", " +
                           std::to_string(e.j) + "}");
    }
    sorted.push_back(e);
  }
  return make(n, std::move(sorted));
}

}  // namespace

std::string_view to_string(GraphErrorKind kind) {
  switch (kind) {
    case GraphErrorKind::SelfLoop: return "self-loop";
    case GraphErrorKind::DuplicateEdge: return "duplicate edge";
    case GraphErrorKind::NonPositiveWeight: return "non-positive weight";
    case GraphErrorKind::MalformedToken: return "malformed token";
    case GraphErrorKind::NodeOutOfRange: return "node id out of range";
    case GraphErrorKind::InvalidHeader: return "invalid header";
    case GraphErrorKind::Empty: return "empty graph";
  }
  return "graph error";
}

GraphError::GraphError(GraphErrorKind kind, std::size_t line, const std::string& detail)
    : InputError(line_prefix(line) + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      line_(line) {}

WeightedGraph WeightedGraph::from_edges(int n, std::vector<Edge> edges) {
  return validate(n, std::move(edges), {}, [](int nn, std::vector<Edge> es) {
    return WeightedGraph(nn, std::move(es));
  });
}

std::optional<std::size_t> WeightedGraph::find_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair(a, b),
                             [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
                               return std::pair(e.i, e.j) < key;
                             });
  if (it == edges_.end() || it->i != a || it->j != b) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

WeightedGraph WeightedGraph::with_weight(std::size_t e, double w) const {
  std::vector<Edge> copy = edges_;
  copy.at(e).w = w;
  return from_edges(n_, std::move(copy));
}

RawEdgeList parse_raw_edge_list(std::istream& in) {
  RawEdgeList out;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    auto toks = split_ws(text);
    if (toks.empty() || toks.front().front() == '#') continue;

    if (toks.front().starts_with("n=")) {
      std::int64_t n = 0;
      if (out.declared_n || !out.edges.empty() || toks.size() != 1 ||
          !parse_int(toks.front().substr(2), n) || n <= 0) {
        throw GraphError(GraphErrorKind::InvalidHeader, line_no,
                         "expected a single 'n=<k>' header (k > 0) before any link");
      }
      out.declared_n = n;
      continue;
    }

    if (toks.size() < 2 || toks.size() > 3) {
      throw GraphError(GraphErrorKind::MalformedToken, line_no,
                       "expected 'i j [w]', got " + std::to_string(toks.size()) + " tokens");
    }
    RawEdge e;
    e.line = line_no;
    if (!parse_int(toks[0], e.i) || !parse_int(toks[1], e.j) || e.i < 0 || e.j < 0) {
      throw GraphError(GraphErrorKind::MalformedToken, line_no,
                       "node ids must be non-negative integers");
    }
    if (toks.size() == 3 && !parse_double(toks[2], e.w)) {
      throw GraphError(GraphErrorKind::MalformedToken, line_no,
                       "weight '" + std::string(toks[2]) + "' is not a number");
    }
    if (e.i == e.j) {
      throw GraphError(GraphErrorKind::SelfLoop, line_no,
                       "self-loop at node " + std::to_string(e.i));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw GraphError(GraphErrorKind::NonPositiveWeight, line_no,
                       "weight must be finite and positive");
    }
    out.edges.push_back(e);
  }
  return out;
}

WeightedGraph graph_from_raw(const RawEdgeList& raw) {
  std::int64_t max_id = -1;
  for (const RawEdge& e : raw.edges) max_id = std::max({max_id, e.i, e.j});
  const std::int64_t n = raw.declared_n.value_or(max_id + 1);
  if (n <= 0) {
    throw GraphError(GraphErrorKind::Empty, 0, "no links and no 'n=' header");
  }
  if (n > std::numeric_limits<int>::max()) {
    throw GraphError(GraphErrorKind::NodeOutOfRange, 0, "node count too large");
  }
  std::vector<Edge> edges;
  std::vector<std::size_t> lines;
  edges.reserve(raw.edges.size());
  for (const RawEdge& e : raw.edges) {
    if (e.i >= n || e.j >= n) {
      throw GraphError(GraphErrorKind::NodeOutOfRange, e.line,
                       "node id " + std::to_string(std::max(e.i, e.j)) +
                           " >= declared n=" + std::to_string(n));
    }
    edges.push_back({static_cast<NodeId>(e.i), static_cast<NodeId>(e.j), e.w});
    lines.push_back(e.line);
  }
  return validate(static_cast<int>(n), std::move(edges), std::move(lines),
                  [](int nn, std::vector<Edge> es) {
                    return WeightedGraph::from_edges(nn, std::move(es));
                  });
}

WeightedGraph parse_edge_list(std::istream& in) { return graph_from_raw(parse_raw_edge_list(in)); }

WeightedGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

std::string to_edge_list(const WeightedGraph& g) {
  std::string out = "n=" + std::to_string(g.node_count()) + "\n";
  char buf[64];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.i, e.j, e.w);
    out += buf;
  }
  return out;
}

std::string to_json(const WeightedGraph& g) {
  nlohmann::json j;
  j["n"] = g.node_count();
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) j["edges"].push_back({e.i, e.j, e.w});
  return j.dump();
}

WeightedGraph graph_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw GraphError(GraphErrorKind::MalformedToken, 0, ex.what());
  }
  if (!j.contains("n") || !j["n"].is_number_integer() || !j.contains("edges") ||
      !j["edges"].is_array()) {
    throw GraphError(GraphErrorKind::MalformedToken, 0,
                     "expected {\"n\": int, \"edges\": [[i, j, w], ...]}");
  }
  std::vector<Edge> edges;
  for (const auto& item : j["edges"]) {
    if (!item.is_array() || item.size() < 2 || item.size() > 3 || !item[0].is_number_integer() ||
        !item[1].is_number_integer() || (item.size() == 3 && !item[2].is_number())) {
      throw GraphError(GraphErrorKind::MalformedToken, 0, "bad edge entry " + item.dump());
    }
    edges.push_back({item[0].get<NodeId>(), item[1].get<NodeId>(),
                     item.size() == 3 ? item[2].get<double>() : 1.0});
  }
  return WeightedGraph::from_edges(j["n"].get<int>(), std::move(edges));
}

GraphMatrices build_matrices(const WeightedGraph& g) {
  const Eigen::Index n = g.node_count();
  const Eigen::Index m = static_cast<Eigen::Index>(g.edge_count());
  GraphMatrices gm;
  gm.laplacian = Eigen::MatrixXd::Zero(n, n);
  gm.adjacency = Eigen::MatrixXd::Zero(n, n);
  gm.incidence = Eigen::MatrixXd::Zero(n, m);
  gm.weights = Eigen::VectorXd::Zero(m);
  gm.degrees = Eigen::VectorXd::Zero(n);

  Eigen::Index col = 0;
  for (const Edge& e : g.edges()) {
    gm.adjacency(e.i, e.j) = e.w;
    gm.adjacency(e.j, e.i) = e.w;
    gm.degrees(e.i) += e.w;
    gm.degrees(e.j) += e.w;
    gm.incidence(e.i, col) = 1.0;
    gm.incidence(e.j, col) = -1.0;
    gm.weights(col) = e.w;
    ++col;
  }
  gm.laplacian = gm.degrees.asDiagonal();
  gm.laplacian -= gm.adjacency;
  return gm;
}

bool is_connected(const WeightedGraph& g) {
  const int n = g.node_count();
  if (n <= 1) return n == 1;
  std::vector<std::vector<NodeId>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(n, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

WeightedGraph scale_weights(const WeightedGraph& g, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError("scale factor must be finite and positive");
  }
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (Edge& e : edges) e.w *= alpha;
  return WeightedGraph::from_edges(g.node_count(), std::move(edges));
}

WeightedGraph path_graph(int n, double w) {
  std::vector<Edge> edges;
  for (int k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1, w});
  return WeightedGraph::from_edges(n, std::move(edges));
}

WeightedGraph cycle_graph(int n, double w) {
  if (n < 3) throw InputError("a cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (int k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n, w});
  return WeightedGraph::from_edges(n, std::move(edges));
}

WeightedGraph complete_graph(int n, double w) {
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b, w});
  return WeightedGraph::from_edges(n, std::move(edges));
}

WeightedGraph star_graph(int n, double w) {
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) edges.push_back({0, k, w});
  return WeightedGraph::from_edges(n, std::move(edges));
}

}  // namespace delaycent
