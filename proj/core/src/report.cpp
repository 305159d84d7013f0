#include "delaycent/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace delaycent {

namespace {

using Json = nlohmann::ordered_json;

std::int64_t label_of(const IdLabels& labels, int id) {
  return labels.empty() ? id : labels.at(static_cast<std::size_t>(id));
}

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_report(x);
}

Json ids_json(const std::vector<int>& ids, const CentralityReport& r, const IdLabels& labels) {
  Json out = Json::array();
  for (int id : ids) {
    if (r.domain == ChannelDomain::Nodes) {
      out.push_back(label_of(labels, id));
    } else {
      out.push_back(id);
    }
  }
  return out;
}

Json report_object(const CentralityReport& r, const WeightedGraph& g, const IdLabels& labels) {
  Json j;
  j["tau"] = number(r.tau);
  j["structure"] = r.structure;
  j["domain"] = r.domain == ChannelDomain::Nodes ? "nodes" : "links";
  Json indices = Json::array();
  for (Eigen::Index k = 0; k < r.indices.size(); ++k) indices.push_back(number(r.indices(k)));
  j["indices"] = std::move(indices);
  j["ranking"] = ids_json(r.ranking, r, labels);
  Json ties = Json::array();
  for (const auto& group : r.tie_groups) ties.push_back(ids_json(group, r, labels));
  j["tie_groups"] = std::move(ties);
  j["tau_max"] = number(r.tau_max);
  j["margin"] = number(r.margin);
  for (const auto& [key, value] : r.extras) j[key] = number(value);
  if (r.domain == ChannelDomain::Nodes) {
    Json nodes = Json::array();
    for (int i = 0; i < g.node_count(); ++i) nodes.push_back(label_of(labels, i));
    j["nodes"] = std::move(nodes);
  } else {
    Json links = Json::array();
    for (const Edge& e : g.edges()) {
      links.push_back(Json::array({label_of(labels, e.i), label_of(labels, e.j)}));
    }
    j["links"] = std::move(links);
  }
  return j;
}

std::string channel_name(const CentralityReport& r, const WeightedGraph& g,
                         const IdLabels& labels, int k) {
  if (r.domain == ChannelDomain::Nodes) return std::to_string(label_of(labels, k));
  const Edge& e = g.edge(k);
  return std::to_string(label_of(labels, e.i)) + "-" + std::to_string(label_of(labels, e.j));
}

}  // namespace

double round_report(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, x);
  return std::stod(buf);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, round_report(x));
  return std::string(buf, res.ptr);
}

std::vector<int> rank_positions(const CentralityReport& r) {
  std::vector<int> rank(r.indices.size(), 0);
  for (std::size_t pos = 0; pos < r.ranking.size(); ++pos) {
    rank[r.ranking[pos]] = static_cast<int>(pos) + 1;
  }
  for (const auto& group : r.tie_groups) {
    int best = static_cast<int>(rank.size());
    for (int id : group) best = std::min(best, rank[id]);
    for (int id : group) rank[id] = best;
  }
  return rank;
}

std::string report_json(const CentralityReport& r, const WeightedGraph& g,
                        const IdLabels& labels) {
  return report_object(r, g, labels).dump(2) + "\n";
}

std::string report_csv(const CentralityReport& r, const WeightedGraph& g,
                       const IdLabels& labels) {
  std::ostringstream os;
  const std::vector<int> rank = rank_positions(r);
  if (r.domain == ChannelDomain::Nodes) {
    os << "id,index,rank\n";
    for (Eigen::Index k = 0; k < r.indices.size(); ++k) {
      os << label_of(labels, static_cast<int>(k)) << ',' << format_number(r.indices(k)) << ','
         << rank[k] << '\n';
    }
  } else {
    os << "u,v,index,rank\n";
    for (Eigen::Index k = 0; k < r.indices.size(); ++k) {
      const Edge& e = g.edge(static_cast<int>(k));
      os << label_of(labels, e.i) << ',' << label_of(labels, e.j) << ','
         << format_number(r.indices(k)) << ',' << rank[k] << '\n';
    }
  }
  return os.str();
}

std::string tau_sweep_json(const TauSweep& sweep, const WeightedGraph& g,
                           const IdLabels& labels) {
  Json j;
  Json reports = Json::array();
  for (const auto& r : sweep.reports) reports.push_back(report_object(r, g, labels));
  j["reports"] = std::move(reports);
  Json flips = Json::array();
  const bool nodes = sweep.reports.empty() || sweep.reports.front().domain == ChannelDomain::Nodes;
  for (const RankFlip& f : sweep.flips) {
    Json flip;
    flip["tau_from"] = number(f.tau_from);
    flip["tau_to"] = number(f.tau_to);
    flip["first"] = nodes ? label_of(labels, f.first) : f.first;
    flip["second"] = nodes ? label_of(labels, f.second) : f.second;
    flips.push_back(std::move(flip));
  }
  j["flips"] = std::move(flips);
  return j.dump(2) + "\n";
}

std::string scale_sweep_json(const ScaleSweep& sweep, const WeightedGraph& g,
                             const IdLabels& labels) {
  Json j;
  Json alphas = Json::array();
  for (double a : sweep.alphas) alphas.push_back(number(a));
  j["alphas"] = std::move(alphas);
  Json reports = Json::array();
  for (const auto& r : sweep.reports) reports.push_back(report_object(r, g, labels));
  j["reports"] = std::move(reports);
  const bool nodes = sweep.reports.empty() || sweep.reports.front().domain == ChannelDomain::Nodes;
  Json ref = Json::array();
  for (int id : sweep.reference_ranking) ref.push_back(nodes ? label_of(labels, id) : id);
  j["reference_ranking"] = std::move(ref);
  Json matches = Json::array();
  for (bool m : sweep.matches_reference) matches.push_back(m);
  j["matches_reference"] = std::move(matches);
  return j.dump(2) + "\n";
}

SweepCsvWriter::SweepCsvWriter(std::ostream& out, const WeightedGraph& g, IdLabels labels)
    : out_(out), graph_(g), labels_(std::move(labels)) {
  out_ << "grid,id,index,rank\n";
}

void SweepCsvWriter::write(double grid, const CentralityReport& r) {
  const std::vector<int> rank = rank_positions(r);
  const std::string g = format_number(grid);
  for (Eigen::Index k = 0; k < r.indices.size(); ++k) {
    out_ << g << ',' << channel_name(r, graph_, labels_, static_cast<int>(k)) << ','
         << format_number(r.indices(k)) << ',' << rank[k] << '\n';
  }
  out_.flush();
}

std::string sim_json(const SimResult& r, const IdLabels& labels) {
  Json j;
  j["rho_hat"] = number(r.rho_hat);
  j["std_err"] = number(r.std_err);
  Json var = Json::array();
  for (Eigen::Index i = 0; i < r.per_node_var.size(); ++i) var.push_back(number(r.per_node_var(i)));
  j["per_node_var"] = std::move(var);
  Json nodes = Json::array();
  for (Eigen::Index i = 0; i < r.per_node_var.size(); ++i) {
    nodes.push_back(label_of(labels, static_cast<int>(i)));
  }
  j["nodes"] = std::move(nodes);
  j["tau_snapped"] = number(r.tau_snapped);
  j["delay_steps"] = r.delay_steps;
  Json cfg;
  cfg["tau"] = number(r.config.tau);
  cfg["dt"] = number(r.config.dt);
  cfg["burn_in"] = number(r.config.burn_in);
  cfg["horizon"] = number(r.config.horizon);
  cfg["n_traj"] = r.config.n_traj;
  cfg["seed"] = r.config.seed;
  j["config"] = std::move(cfg);
  return j.dump(2) + "\n";
}

}  // namespace delaycent
