#include "delaycent_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "delaycent/centrality.hpp"
#include "delaycent/oracles.hpp"
#include "delaycent/second_order.hpp"

namespace delaycent::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string graph_path;
  std::string structure = "dynamics";
  double tau = 0.0;
  std::vector<double> taus;
  std::vector<double> alphas;
  double b = 1.0;
  std::string sigma2_path;
  std::string output_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string id_map_path;
  double quad_tol = 1e-9;
  int n_traj = 32;
  double dt = 1e-3;
  double burn_in = 50.0;
  double horizon = 500.0;
  int verbosity = 0;
};

class Logger {
 public:
  Logger(std::ostream& err, int level) : err_(err), level_(level) {}
  template <class... Args>
  void info(const Args&... args) {
    if (level_ < 1) return;
    err_ << "[delaycent] ";
    (err_ << ... << args);
    err_ << '\n';
  }

 private:
  std::ostream& err_;
  int level_;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RemappedGraph load_graph(const std::string& path) {
  if (ends_with(path, ".json")) return {graph_from_json(read_file(path)), {}};
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return remap_node_ids(parse_raw_edge_list(in));
}

NoiseStructure structure_from(const std::string& name) {
  auto tag = parse_structure_tag(name);
  if (!tag || *tag == StructureTag::Custom) {
    throw InputError("unknown structure '" + name +
                     "' (dynamics, sensor, receiver, emitter, comm-channel, measurement)");
  }
  return NoiseStructure(*tag);
}

Eigen::VectorXd read_variances(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    if (token.front() == '#') {
      std::getline(in, token);
      continue;
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError(path + ": malformed variance '" + token + "'");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void require_increasing(const std::vector<double>& grid, const std::string& name) {
  if (grid.empty()) throw InputError(name + " must not be empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw InputError(name + " must be strictly increasing");
  }
}

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_report(x);
}

// Flat key,value CSV for scalar reports.
std::string flat_csv(const Json& j) {
  std::ostringstream os;
  os << "field,value\n";
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      for (std::size_t k = 0; k < value.size(); ++k) {
        os << key << '[' << k << "]," << (value[k].is_number() ? format_number(value[k].get<double>())
                                                               : value[k].dump())
           << '\n';
      }
    } else if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) {
        os << key << '.' << sub << ','
           << (v.is_number_float() ? format_number(v.get<double>()) : v.dump()) << '\n';
      }
    } else if (value.is_number_float()) {
      os << key << ',' << format_number(value.get<double>()) << '\n';
    } else if (value.is_string()) {
      os << key << ',' << value.get<std::string>() << '\n';
    } else {
      os << key << ',' << value.dump() << '\n';
    }
  }
  return os.str();
}

class Session {
 public:
  Session(const Options& opt, std::ostream& out, std::ostream& err)
      : opt_(opt), out_(&out), err_(err), log_(err, opt.verbosity) {}

  void open_output() {
    if (opt_.output_path.empty()) return;
    file_ = std::make_unique<std::ofstream>(opt_.output_path, std::ios::binary);
    if (!*file_) throw InputError("cannot write " + opt_.output_path);
    out_ = file_.get();
  }

  const RemappedGraph& graph() {
    if (!graph_) {
      if (opt_.graph_path.empty()) throw InputError("--graph is required");
      graph_ = load_graph(opt_.graph_path);
      log_.info("graph ", opt_.graph_path, ": n=", graph_->graph.node_count(),
                " links=", graph_->graph.edge_count());
      if (!opt_.id_map_path.empty()) {
        std::ofstream map(opt_.id_map_path, std::ios::binary);
        if (!map) throw InputError("cannot write " + opt_.id_map_path);
        map << id_map_json(*graph_);
      }
    }
    return *graph_;
  }

  const ConsensusNetwork& network() {
    if (!net_) {
      net_ = std::make_unique<ConsensusNetwork>(graph().graph);
      log_.info("lambda_max=", net_->spectrum().max_eigenvalue(),
                " zero modes=", net_->spectrum().zero_mode_count);
    }
    return *net_;
  }

  const IdLabels& labels() { return graph().labels; }
  bool csv() const { return opt_.format == "csv"; }
  std::ostream& out() { return *out_; }
  Logger& log() { return log_; }

  void emit_report(const CentralityReport& r) {
    out() << (csv() ? report_csv(r, graph().graph, labels()) : report_json(r, graph().graph, labels()));
  }

  void emit_flat(const Json& j) { out() << (csv() ? flat_csv(j) : j.dump(2) + "\n"); }

 private:
  const Options& opt_;
  std::ostream* out_;
  std::ostream& err_;
  Logger log_;
  std::unique_ptr<std::ofstream> file_;
  std::optional<RemappedGraph> graph_;
  std::unique_ptr<ConsensusNetwork> net_;
};

SimConfig sim_config(const Options& opt, double tau) {
  SimConfig cfg;
  cfg.tau = tau;
  cfg.dt = opt.dt;
  cfg.burn_in = opt.burn_in;
  cfg.horizon = opt.horizon;
  cfg.n_traj = opt.n_traj;
  cfg.seed = opt.seed;
  return cfg;
}

int cmd_stability(Session& s, const Options& opt) {
  const ConsensusNetwork& net = s.network();
  const StabilityMargin m = net.stability(opt.tau);
  Json j;
  j["tau"] = number(opt.tau);
  j["tau_max"] = number(m.tau_max);
  j["margin"] = number(m.margin);
  j["stable"] = m.stable;
  j["lambda_max"] = number(net.spectrum().max_eigenvalue());
  s.emit_flat(j);
  return m.stable ? kOk : kUnstable;
}

int cmd_centrality(Session& s, const Options& opt) {
  s.emit_report(centrality(s.network(), structure_from(opt.structure), opt.tau));
  return kOk;
}

int cmd_rank(Session& s, const Options& opt) {
  const CentralityReport r = centrality(s.network(), structure_from(opt.structure), opt.tau);
  const bool nodes = r.domain == ChannelDomain::Nodes;
  const auto& g = s.graph().graph;
  auto name = [&](int id) -> Json {
    if (nodes) return s.labels().empty() ? std::int64_t{id} : s.labels()[id];
    return id;
  };
  if (s.csv()) {
    const std::vector<int> rank = rank_positions(r);
    s.out() << (nodes ? "position,id,rank\n" : "position,link,u,v,rank\n");
    for (std::size_t p = 0; p < r.ranking.size(); ++p) {
      const int id = r.ranking[p];
      s.out() << p + 1 << ',';
      if (nodes) {
        s.out() << name(id).dump();
      } else {
        const Edge& e = g.edge(id);
        const auto label = [&](int v) { return s.labels().empty() ? std::int64_t{v} : s.labels()[v]; };
        s.out() << id << ',' << label(e.i) << ',' << label(e.j);
      }
      s.out() << ',' << rank[id] << '\n';
    }
    return kOk;
  }
  Json j;
  j["tau"] = number(r.tau);
  j["structure"] = r.structure;
  Json order = Json::array();
  for (int id : r.ranking) order.push_back(name(id));
  j["ranking"] = std::move(order);
  Json ties = Json::array();
  for (const auto& group : r.tie_groups) {
    Json t = Json::array();
    for (int id : group) t.push_back(name(id));
    ties.push_back(std::move(t));
  }
  j["tie_groups"] = std::move(ties);
  s.out() << j.dump(2) << '\n';
  return kOk;
}

int cmd_sensitivity(Session& s, const Options& opt) {
  const ConsensusNetwork& net = s.network();
  const NoiseStructure st = structure_from(opt.structure);
  Eigen::VectorXd kappa = link_sensitivity(net, st, opt.tau);
  CentralityReport r = make_report(std::move(kappa), opt.tau,
                                   "sensitivity-" + std::string(to_string(st.tag())),
                                   ChannelDomain::Links, net.stability(opt.tau));
  s.emit_report(r);
  return kOk;
}

int cmd_perf(Session& s, const Options& opt) {
  const ConsensusNetwork& net = s.network();
  NoiseSpec spec{structure_from(opt.structure), std::nullopt};
  if (!opt.sigma2_path.empty()) spec.variances = read_variances(opt.sigma2_path);
  const double rho = performance(net, spec, opt.tau);
  const StabilityMargin m = net.stability(opt.tau);
  Json j;
  j["tau"] = number(opt.tau);
  j["structure"] = std::string(to_string(spec.structure.tag()));
  j["rho_ss"] = number(rho);
  j["tau_max"] = number(m.tau_max);
  j["margin"] = number(m.margin);
  s.emit_flat(j);
  return kOk;
}

int cmd_sweep_tau(Session& s, const Options& opt) {
  require_increasing(opt.taus, "--taus");
  const ConsensusNetwork& net = s.network();
  const NoiseStructure st = structure_from(opt.structure);
  if (s.csv()) {
    SweepCsvWriter writer(s.out(), s.graph().graph, s.labels());
    std::optional<CentralityReport> previous;
    for (double tau : opt.taus) {
      CentralityReport r = centrality(net, st, tau);
      writer.write(tau, r);
      if (previous) {
        for (Eigen::Index a = 0; a < r.indices.size(); ++a) {
          for (Eigen::Index b = a + 1; b < r.indices.size(); ++b) {
            const int before = compare_ranked(previous->indices, a, b);
            const int after = compare_ranked(r.indices, a, b);
            if (before != 0 && after == -before) {
              s.log().info("rank flip ", a, "/", b, " between tau=", previous->tau, " and ", tau);
            }
          }
        }
      }
      previous = std::move(r);
    }
    return kOk;
  }
  const TauSweep sweep = tau_sweep(net, st, opt.taus);
  s.out() << tau_sweep_json(sweep, s.graph().graph, s.labels());
  return kOk;
}

int cmd_sweep_scale(Session& s, const Options& opt) {
  require_increasing(opt.alphas, "--alphas");
  const ConsensusNetwork& net = s.network();
  const NoiseStructure st = structure_from(opt.structure);
  if (s.csv()) {
    SweepCsvWriter writer(s.out(), s.graph().graph, s.labels());
    for (double alpha : opt.alphas) {
      const ConsensusNetwork scaled(scale_weights(net.graph(), alpha));
      writer.write(alpha, centrality(scaled, st, opt.tau));
    }
    return kOk;
  }
  const ScaleSweep sweep = scale_sweep(net, st, opt.tau, opt.alphas);
  s.out() << scale_sweep_json(sweep, s.graph().graph, s.labels());
  return kOk;
}

int cmd_second_order(Session& s, const Options& opt) {
  SecondOrderConfig cfg;
  cfg.b = opt.b;
  cfg.tau = opt.tau;
  cfg.quad_tol = opt.quad_tol;
  s.emit_report(so_node_centrality(s.network(), cfg));
  return kOk;
}

Eigen::VectorXd variances_for(const Options& opt, Eigen::Index channels) {
  if (opt.sigma2_path.empty()) return Eigen::VectorXd::Ones(channels);
  return read_variances(opt.sigma2_path);
}

int cmd_simulate(Session& s, const Options& opt) {
  const ConsensusNetwork& net = s.network();
  const NoiseStructure st = structure_from(opt.structure);
  const SimConfig cfg = sim_config(opt, opt.tau);
  net.require_stable(cfg.tau_snapped());
  const Eigen::MatrixXd input = input_matrix(net.matrices(), st);
  const SimResult r = simulate(net.matrices(), input, variances_for(opt, input.cols()), cfg);
  if (s.csv()) {
    s.out() << flat_csv(Json::parse(sim_json(r, s.labels())));
  } else {
    s.out() << sim_json(r, s.labels());
  }
  return kOk;
}

int cmd_verify(Session& s, const Options& opt) {
  const ConsensusNetwork& net = s.network();
  const NoiseStructure st = structure_from(opt.structure);
  const SimConfig cfg = sim_config(opt, opt.tau);
  net.require_stable(cfg.tau_snapped());
  const Eigen::MatrixXd input = input_matrix(net.matrices(), st);
  const Eigen::VectorXd var = variances_for(opt, input.cols());
  const double closed = performance(net, NoiseSpec{st, var}, cfg.tau_snapped());
  const SimResult r = simulate(net.matrices(), input, var, cfg);
  const double z = r.std_err > 0.0 ? (r.rho_hat - closed) / r.std_err
                                   : (r.rho_hat == closed ? 0.0 : INFINITY);
  const bool pass = std::abs(z) <= 3.0;
  Json j;
  j["structure"] = std::string(to_string(st.tag()));
  j["tau"] = number(opt.tau);
  j["tau_snapped"] = number(cfg.tau_snapped());
  j["closed_form"] = number(closed);
  j["rho_hat"] = number(r.rho_hat);
  j["std_err"] = number(r.std_err);
  j["z"] = number(z);
  j["pass"] = pass;
  s.emit_flat(j);
  s.log().info("verify: closed form ", closed, " vs Monte Carlo ", r.rho_hat, " +- ", r.std_err,
               pass ? " (pass)" : " (FAIL)");
  if (!pass) {
    throw NumericError("Monte Carlo estimate outside 3 standard errors (z = " +
                       format_number(z) + ")");
  }
  return kOk;
}

}  // namespace

RemappedGraph remap_node_ids(const RawEdgeList& raw) {
  if (raw.declared_n) return {graph_from_raw(raw), {}};
  std::set<std::int64_t> ids;
  for (const RawEdge& e : raw.edges) {
    ids.insert(e.i);
    ids.insert(e.j);
  }
  if (ids.empty()) return {graph_from_raw(raw), {}};
  if (*ids.rbegin() + 1 == static_cast<std::int64_t>(ids.size())) return {graph_from_raw(raw), {}};

  std::map<std::int64_t, std::int64_t> dense;
  IdLabels labels;
  for (std::int64_t id : ids) {
    dense.emplace(id, static_cast<std::int64_t>(labels.size()));
    labels.push_back(id);
  }
  RawEdgeList relabelled;
  relabelled.declared_n = static_cast<std::int64_t>(labels.size());
  relabelled.edges = raw.edges;
  for (RawEdge& e : relabelled.edges) {
    e.i = dense.at(e.i);
    e.j = dense.at(e.j);
  }
  return {graph_from_raw(relabelled), std::move(labels)};
}

std::string id_map_json(const RemappedGraph& g) {
  Json j = Json::object();
  for (int i = 0; i < g.graph.node_count(); ++i) {
    const std::int64_t original = g.labels.empty() ? i : g.labels[i];
    j[std::to_string(original)] = i;
  }
  return j.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Delay-aware centrality for noisy consensus networks", "delaycent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "delaycent 0.1.0");

  auto common = [&](CLI::App* sub, bool needs_structure) {
    sub->add_option("-g,--graph", opt.graph_path, "edge list (.edges/.txt) or graph JSON (.json)")
        ->required();
    if (needs_structure) sub->add_option("-s,--structure", opt.structure, "noise structure");
    sub->add_option("-o,--output", opt.output_path, "write the report here instead of stdout");
    sub->add_option("-f,--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--id-map", opt.id_map_path, "write the original -> internal id map (JSON)");
    sub->add_flag("-v,--verbose", "diagnostics on stderr");
  };
  auto mc = [&](CLI::App* sub) {
    sub->add_option("--sigma2", opt.sigma2_path, "file with one variance per channel");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--n-traj", opt.n_traj, "trajectories")->check(CLI::PositiveNumber);
    sub->add_option("--dt", opt.dt, "time step")->check(CLI::PositiveNumber);
    sub->add_option("--burn-in", opt.burn_in, "discarded transient")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", opt.horizon, "averaging window")->check(CLI::PositiveNumber);
  };

  auto* stability = app.add_subcommand("stability", "delay margin tau_max = pi/(2 lambda_n)");
  common(stability, false);
  stability->add_option("-t,--tau", opt.tau, "delay")->required();

  auto* centrality_cmd = app.add_subcommand("centrality", "node or link indices");
  common(centrality_cmd, true);
  centrality_cmd->add_option("-t,--tau", opt.tau, "delay");

  auto* sensitivity = app.add_subcommand("sensitivity", "link sensitivities (dynamics, sensor)");
  common(sensitivity, true);
  sensitivity->add_option("-t,--tau", opt.tau, "delay");

  auto* perf = app.add_subcommand("perf", "steady-state dispersion");
  common(perf, true);
  perf->add_option("-t,--tau", opt.tau, "delay");
  perf->add_option("--sigma2", opt.sigma2_path, "file with one variance per channel");

  auto* rank = app.add_subcommand("rank", "ranking only");
  common(rank, true);
  rank->add_option("-t,--tau", opt.tau, "delay");

  auto* sweep_tau = app.add_subcommand("sweep-tau", "indices over a delay grid");
  common(sweep_tau, true);
  sweep_tau->add_option("--taus", opt.taus, "comma-separated, strictly increasing")
      ->required()
      ->delimiter(',');

  auto* sweep_scale = app.add_subcommand("sweep-scale", "indices over weight scalings");
  common(sweep_scale, true);
  sweep_scale->add_option("-t,--tau", opt.tau, "delay");
  sweep_scale->add_option("--alphas", opt.alphas, "comma-separated, strictly increasing")
      ->required()
      ->delimiter(',');

  auto* second = app.add_subcommand("second-order", "second-order node indices (dynamics noise)");
  common(second, false);
  second->add_option("-t,--tau", opt.tau, "delay");
  second->add_option("-b,--b", opt.b, "velocity gain")->check(CLI::PositiveNumber);
  second->add_option("--quad-tol", opt.quad_tol, "quadrature tolerance")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Euler-Maruyama estimate of the dispersion");
  common(sim, true);
  sim->add_option("-t,--tau", opt.tau, "delay");
  mc(sim);

  auto* verify = app.add_subcommand("verify", "closed form vs Monte Carlo at 3 standard errors");
  common(verify, true);
  verify->add_option("-t,--tau", opt.tau, "delay");
  mc(verify);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << "delaycent 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  opt.verbosity = static_cast<int>(app.get_subcommands().front()->count("--verbose"));

  Session session(opt, out, err);
  try {
    session.open_output();
    if (*stability) return cmd_stability(session, opt);
    if (*centrality_cmd) return cmd_centrality(session, opt);
    if (*sensitivity) return cmd_sensitivity(session, opt);
    if (*perf) return cmd_perf(session, opt);
    if (*rank) return cmd_rank(session, opt);
    if (*sweep_tau) return cmd_sweep_tau(session, opt);
    if (*sweep_scale) return cmd_sweep_scale(session, opt);
    if (*second) return cmd_second_order(session, opt);
    if (*sim) return cmd_simulate(session, opt);
    if (*verify) return cmd_verify(session, opt);
  } catch (const StabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kUnstable;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace delaycent::cli
