#ifndef GRADEDTODA_CLI_HPP
#define GRADEDTODA_CLI_HPP

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradedtoda/io.hpp"
#include "gradedtoda/lax.hpp"
#include "gradedtoda/lift_compare.hpp"
#include "gradedtoda/soliton.hpp"
#include "gradedtoda/version.hpp"

namespace gradedtoda {

// Exit codes: 0 success, 1 runtime/assumption failure, 2 usage/parse error.
inline int exit_code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonContiguousWindow:
    case ErrorCode::EdgeRankViolation:
    case ErrorCode::Disconnected:
    case ErrorCode::NonPositiveMeasure:
    case ErrorCode::UnknownVertex:
    case ErrorCode::UnknownFamily:
    case ErrorCode::BadParams:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::WindowMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
      return 2;
    default:
      return 1;
  }
}

struct RunConfig {
  // graph source
  std::string graph_file;
  std::string builtin;
  std::string window;
  int level = 1;
  int period = 2;
  // run parameters
  std::string potential = "toda";
  std::string init = "equilibrium";
  double t_end = 1.0;
  double step = 1e-3;
  int stride = 1;
  double blow_up_bound = kDefaultBlowUpBound;
  std::string vars = "phase";
  // validation
  double delta = kDefaultMassDelta;
  double tol = 1e-12;
  // soliton subcommand
  int n_solitons = 0;  // 0 = infer from the list lengths
  std::string kappa = "1";
  std::string gamma = "1";
  std::string sigma = "+1";
  double q0 = 0.0;
  double snapshot_t = 0.0;
  // dump-operator
  std::string op = "lifted";
  double a_const = 1.0;
  double b_const = 0.0;
  bool random_jacobi = false;
  bool emit_spectrum = false;
  // output
  std::string out = "-";
  std::string format = "csv";
  unsigned seed = 12345;
};

namespace cli_detail {

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::ParseError, "empty list");
  return out;
}

inline SolitonParams soliton_from_fields(const std::string& kappa, const std::string& gamma,
                                         const std::string& sigma, double q0) {
  auto kv = parse_list(kappa);
  auto gv = parse_list(gamma);
  auto sv = parse_list(sigma);
  Eigen::VectorXd k = Eigen::Map<Eigen::VectorXd>(kv.data(), static_cast<Eigen::Index>(kv.size()));
  Eigen::VectorXd g = Eigen::Map<Eigen::VectorXd>(gv.data(), static_cast<Eigen::Index>(gv.size()));
  std::vector<int> s;
  for (double x : sv) s.push_back(x >= 0 ? 1 : -1);
  return SolitonParams::make(k, g, s, q0);
}

// "soliton:kappa=1,gamma=1,sigma=+1[,q0=0][,center=6][,N=1]"; list values are
// ';'-separated; center overrides gamma for a single soliton.
inline SolitonParams parse_soliton_spec(const std::string& spec) {
  std::string body = spec.substr(spec.find(':') + 1);
  std::string kappa = "1", gamma = "1", sigma = "+1";
  double q0 = 0.0;
  bool has_center = false;
  double center = 0.0;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ParseError, "expected key=value in soliton spec");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "kappa") kappa = val;
    else if (key == "gamma") gamma = val;
    else if (key == "sigma") sigma = val;
    else if (key == "q0") q0 = std::stod(val);
    else if (key == "center") { has_center = true; center = std::stod(val); }
    else if (key == "N") { /* redundant; lengths define N */ }
    else fail(ErrorCode::ParseError, "unknown soliton key '" + key + "'");
  }
  SolitonParams sp = soliton_from_fields(kappa, gamma, sigma, q0);
  if (has_center) {
    if (sp.size() != 1) fail(ErrorCode::ParseError, "center= only applies to a single soliton");
    sp = centered_soliton(sp.kappa(0), sp.sigma[0], center, q0);
  }
  return sp;
}

inline GradedGraph graph_from_config(const RunConfig& cfg) {
  if (!cfg.graph_file.empty()) {
    log_message(LogLevel::info, "loading graph from " + cfg.graph_file);
    return build_graph(load_graph_spec(cfg.graph_file));
  }
  if (cfg.builtin.empty())
    fail(ErrorCode::ParseError, "need either --graph <file> or --builtin <family>");
  BuiltinParams p;
  if (!cfg.window.empty()) {
    auto [a, b] = parse_window(cfg.window);
    p.n_min = a;
    p.n_max = b;
  }
  p.level = cfg.level;
  p.period = cfg.period;
  GradedGraph g = builtin_graph(builtin_family_from_name(cfg.builtin), p);
  log_message(LogLevel::info, "built '" + cfg.builtin + "' graph: " +
                                  std::to_string(g.vertex_count()) + " vertices, " +
                                  std::to_string(g.edge_count()) + " edges on [" +
                                  std::to_string(g.n_min()) + ", " + std::to_string(g.n_max()) +
                                  "]");
  return g;
}

inline Potential potential_from_config(const RunConfig& cfg) {
  if (cfg.potential == "toda") return toda_potential();
  if (cfg.potential == "harmonic") return harmonic_potential();
  fail(ErrorCode::ParseError, "unknown potential '" + cfg.potential + "'");
}

inline PhaseState initial_state(const RunConfig& cfg, const GradedGraph& g) {
  if (cfg.init == "equilibrium") {
    return {GraphFunction::Zero(g.vertex_count()), GraphFunction::Zero(g.vertex_count()), 0.0};
  }
  if (cfg.init.rfind("soliton:", 0) == 0) {
    SolitonParams sp = parse_soliton_spec(cfg.init);
    auto [q, p] = soliton_state(sp, g.n_min(), g.n_max(), 0.0);
    return lift_radial_state(q, p, g);
  }
  // otherwise a JSON file {"q": {id: value}, "p": {id: value}}; missing ids are 0
  std::ifstream in(cfg.init);
  if (!in) fail(ErrorCode::IoError, "cannot open initial-condition file '" + cfg.init + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("initial-condition file: ") + e.what());
  }
  PhaseState st{GraphFunction::Zero(g.vertex_count()), GraphFunction::Zero(g.vertex_count()), 0.0};
  if (j.contains("q"))
    for (auto it = j["q"].begin(); it != j["q"].end(); ++it)
      st.q(g.vertex_index(it.key())) = it.value().get<double>();
  if (j.contains("p"))
    for (auto it = j["p"].begin(); it != j["p"].end(); ++it)
      st.p(g.vertex_index(it.key())) = it.value().get<double>();
  return st;
}

// Resolves --out; '-' means the stream handed to run_cli.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) fail(ErrorCode::IoError, "cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

inline std::string config_hash(const RunConfig& c, const std::string& sub) {
  std::ostringstream ss;
  ss << sub << '|' << c.graph_file << '|' << c.builtin << '|' << c.window << '|' << c.level << '|'
     << c.period << '|' << c.potential << '|' << c.init << '|' << c.t_end << '|' << c.step << '|'
     << c.stride << '|' << c.vars << '|' << c.kappa << '|' << c.gamma << '|' << c.sigma << '|'
     << c.q0 << '|' << c.snapshot_t << '|' << c.op << '|' << c.a_const << '|' << c.b_const << '|'
     << c.random_jacobi << '|' << c.seed << '|' << c.delta << '|' << c.tol << '|' << c.format;
  return hash_hex(ss.str());
}

inline void csv_header(std::ostream& os, const std::string& hash) {
  os << "# graded-toda " << GRADEDTODA_VERSION << " config=" << hash << "\n";
}

inline nlohmann::json json_header(const std::string& hash) {
  return {{"version", GRADEDTODA_VERSION}, {"config_hash", hash}};
}

// --- subcommands -----------------------------------------------------------

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GradedGraph g = graph_from_config(cfg);
  ValidationReport rep = validate(g, cfg.delta, cfg.tol);
  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "validate");
  if (cfg.format == "json") {
    nlohmann::json j = json_header(hash);
    j["flags"] = {{"graded", rep.graded},
                  {"layer_prob_v", rep.layer_prob_v},
                  {"layer_prob_e", rep.layer_prob_e},
                  {"measure_balance", rep.measure_balance},
                  {"combinatorics_balance", rep.combinatorics_balance},
                  {"mass_lower_bound", rep.mass_lower_bound}};
    j["issues"] = nlohmann::json::array();
    for (const auto& is : rep.issues)
      j["issues"].push_back({{"where", is.where}, {"residual", is.residual}});
    j["ok"] = rep.all_ok();
    target.stream() << j.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    target.stream() << "check,ok\n";
    target.stream() << "graded," << rep.graded << "\n";
    target.stream() << "layer_prob_v," << rep.layer_prob_v << "\n";
    target.stream() << "layer_prob_e," << rep.layer_prob_e << "\n";
    target.stream() << "measure_balance," << rep.measure_balance << "\n";
    target.stream() << "combinatorics_balance," << rep.combinatorics_balance << "\n";
    target.stream() << "mass_lower_bound," << rep.mass_lower_bound << "\n";
    for (const auto& is : rep.issues)
      target.stream() << "issue," << is.where << "," << format_double(is.residual) << "\n";
  }
  if (!rep.all_ok()) {
    err << "validation failed (" << rep.issues.size() << " issue(s))\n";
    return 1;
  }
  return 0;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GradedGraph g = graph_from_config(cfg);
  Potential pot = potential_from_config(cfg);
  PhaseState init = initial_state(cfg, g);
  IntegrationOptions opts{cfg.step, cfg.stride, cfg.blow_up_bound};
  std::vector<PhaseState> traj;
  log_message(LogLevel::debug, "integrating to t=" + std::to_string(cfg.t_end) + " at step " +
                                   std::to_string(cfg.step));
  try {
    traj = integrate_phase(g, pot, init, cfg.t_end, opts);
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << "\n";
    err << "last finite sample time: " << format_double(e.last_good_time()) << "\n";
    return 1;
  }
  log_message(LogLevel::info, "stored " + std::to_string(traj.size()) + " samples");
  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "simulate");
  if (cfg.format == "json") {
    nlohmann::json j = json_header(hash);
    j["samples"] = nlohmann::json::array();
    for (const auto& st : traj) {
      nlohmann::json s = {{"t", st.time}};
      if (cfg.vars == "flaschka") {
        FlaschkaState f = flaschka_forward(g, st, pot);
        for (int e = 0; e < g.edge_count(); ++e)
          s["a"][g.vertex_id(g.edge_from(e)) + "->" + g.vertex_id(g.edge_to(e))] = f.a(e);
        for (int v = 0; v < g.vertex_count(); ++v) s["b"][g.vertex_id(v)] = f.b(v);
      } else {
        for (int v = 0; v < g.vertex_count(); ++v) {
          s["q"][g.vertex_id(v)] = st.q(v);
          s["p"][g.vertex_id(v)] = st.p(v);
        }
      }
      j["samples"].push_back(s);
    }
    target.stream() << j.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    if (cfg.vars == "flaschka") {
      target.stream() << "t,id,var,value\n";
      for (const auto& st : traj) {
        FlaschkaState f = flaschka_forward(g, st, pot);
        for (int e = 0; e < g.edge_count(); ++e)
          target.stream() << format_double(st.time) << ","
                          << g.vertex_id(g.edge_from(e)) << "->" << g.vertex_id(g.edge_to(e))
                          << ",a," << format_double(f.a(e)) << "\n";
        for (int v = 0; v < g.vertex_count(); ++v)
          target.stream() << format_double(st.time) << "," << g.vertex_id(v) << ",b,"
                          << format_double(f.b(v)) << "\n";
      }
    } else {
      target.stream() << "t,vertex,q,p\n";
      for (const auto& st : traj)
        for (int v = 0; v < g.vertex_count(); ++v)
          target.stream() << format_double(st.time) << "," << g.vertex_id(v) << ","
                          << format_double(st.q(v)) << "," << format_double(st.p(v)) << "\n";
    }
  }
  return 0;
}

inline int cmd_soliton(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.window.empty()) fail(ErrorCode::ParseError, "soliton needs --window a:b");
  auto [a, b] = parse_window(cfg.window);
  SolitonParams sp = soliton_from_fields(cfg.kappa, cfg.gamma, cfg.sigma, cfg.q0);
  if (cfg.n_solitons != 0 && cfg.n_solitons != sp.size())
    fail(ErrorCode::ParseError, "--N=" + std::to_string(cfg.n_solitons) + " but " +
                                    std::to_string(sp.size()) + " parameter triples given");
  auto [q, p] = soliton_state(sp, a, b, cfg.snapshot_t);
  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "soliton");
  if (cfg.format == "json") {
    nlohmann::json j = json_header(hash);
    j["t"] = cfg.snapshot_t;
    j["sites"] = nlohmann::json::array();
    for (int n = a; n <= b; ++n)
      j["sites"].push_back({{"n", n}, {"q", q(n - a)}, {"p", p(n - a)}});
    target.stream() << j.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    target.stream() << "n,q,p\n";
    for (int n = a; n <= b; ++n)
      target.stream() << n << "," << format_double(q(n - a)) << "," << format_double(p(n - a))
                      << "\n";
  }
  return 0;
}

inline int cmd_lift_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GradedGraph g = graph_from_config(cfg);
  IntegrationOptions opts{cfg.step, cfg.stride, cfg.blow_up_bound};
  LiftCompareReport rep;
  if (cfg.init.rfind("soliton:", 0) == 0) {
    rep = lift_compare_soliton(g, parse_soliton_spec(cfg.init), cfg.t_end, opts);
  } else if (cfg.init == "equilibrium") {
    rep = lift_compare_chain_init(g, ChainFunction::Zero(g.window_size()),
                                  ChainFunction::Zero(g.window_size()),
                                  potential_from_config(cfg), cfg.t_end, opts);
  } else {
    fail(ErrorCode::ParseError, "lift-compare supports --init soliton:... or equilibrium");
  }
  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "lift-compare");
  if (cfg.format == "json") {
    nlohmann::json j = json_header(hash);
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rep.rows) {
      nlohmann::json row = {{"t", r.t},        {"q_vs_chain", r.q_vs_chain},
                            {"p_vs_chain", r.p_vs_chain}, {"spread_q", r.spread_q},
                            {"spread_v", r.spread_v}};
      if (rep.has_closed_form) {
        row["q_vs_closed"] = r.q_vs_closed;
        row["p_vs_closed"] = r.p_vs_closed;
      }
      j["rows"].push_back(row);
    }
    j["max_q_vs_chain"] = rep.max_q_vs_chain;
    j["max_spread_q"] = rep.max_spread_q;
    if (rep.has_closed_form) j["max_q_vs_closed"] = rep.max_q_vs_closed;
    target.stream() << j.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    target.stream() << "t,q_vs_chain,p_vs_chain,spread_q,spread_v";
    if (rep.has_closed_form) target.stream() << ",q_vs_closed,p_vs_closed";
    target.stream() << "\n";
    for (const auto& r : rep.rows) {
      target.stream() << format_double(r.t) << "," << format_double(r.q_vs_chain) << ","
                      << format_double(r.p_vs_chain) << "," << format_double(r.spread_q) << ","
                      << format_double(r.spread_v);
      if (rep.has_closed_form)
        target.stream() << "," << format_double(r.q_vs_closed) << ","
                        << format_double(r.p_vs_closed);
      target.stream() << "\n";
    }
  }
  err << "max_q_vs_chain=" << format_double(rep.max_q_vs_chain)
      << " max_spread_q=" << format_double(rep.max_spread_q);
  if (rep.has_closed_form) err << " max_q_vs_closed=" << format_double(rep.max_q_vs_closed);
  err << "\n";
  return 0;
}

inline int cmd_lax_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GradedGraph g = graph_from_config(cfg);
  Potential pot = toda_potential();
  PhaseState init = initial_state(cfg, g);
  IntegrationOptions opts{cfg.step, cfg.stride, cfg.blow_up_bound};
  std::vector<PhaseState> traj;
  try {
    traj = integrate_phase(g, pot, init, cfg.t_end, opts);
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  NoLiftReport rep = analyze_no_lift(g, traj, pot);
  std::vector<FlaschkaState> chain_traj;
  chain_traj.reserve(traj.size());
  for (const auto& st : traj) {
    JacobiOperator1D j = reduce_flaschka(g, flaschka_forward(g, st, pot));
    chain_traj.push_back({j.a, j.b, st.time});
  }
  RadialLaxReport lax_rep = verify_radial_lax(g, chain_traj);

  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "lax-check");
  const int m = static_cast<int>(rep.radial_spectra.cols());
  const int k = static_cast<int>(rep.kernel_spectra.cols());
  if (cfg.format == "json") {
    nlohmann::json j = json_header(hash);
    j["rows"] = nlohmann::json::array();
    for (size_t i = 0; i < rep.times.size(); ++i) {
      nlohmann::json row = {{"t", rep.times[i]}, {"b0", rep.b0[i]}};
      row["radial_spectrum"] = std::vector<double>(
          rep.radial_spectra.row(static_cast<Eigen::Index>(i)).begin(),
          rep.radial_spectra.row(static_cast<Eigen::Index>(i)).end());
      row["kernel_spectrum"] = std::vector<double>(
          rep.kernel_spectra.row(static_cast<Eigen::Index>(i)).begin(),
          rep.kernel_spectra.row(static_cast<Eigen::Index>(i)).end());
      if (i >= 1 && i - 1 < lax_rep.projected.size()) {
        row["residual_projected"] = lax_rep.projected[i - 1];
        row["residual_full"] = lax_rep.full[i - 1];
      }
      j["rows"].push_back(row);
    }
    j["obstructed"] = rep.obstructed;
    j["kernel_variation"] = rep.kernel_variation;
    j["radial_drift"] = rep.radial_drift;
    j["max_residual_projected"] = lax_rep.max_projected;
    j["max_residual_full"] = lax_rep.max_full;
    j["prad_respects_adjacency"] = lax_rep.prad_respects_adjacency;
    target.stream() << j.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    target.stream() << "t";
    for (int c = 0; c < m; ++c) target.stream() << ",radial_" << c;
    for (int c = 0; c < k; ++c) target.stream() << ",kernel_" << c;
    target.stream() << ",residual_projected,residual_full\n";
    for (size_t i = 0; i < rep.times.size(); ++i) {
      target.stream() << format_double(rep.times[i]);
      for (int c = 0; c < m; ++c)
        target.stream() << "," << format_double(rep.radial_spectra(static_cast<Eigen::Index>(i), c));
      for (int c = 0; c < k; ++c)
        target.stream() << "," << format_double(rep.kernel_spectra(static_cast<Eigen::Index>(i), c));
      if (i >= 1 && i - 1 < lax_rep.projected.size())
        target.stream() << "," << format_double(lax_rep.projected[i - 1]) << ","
                        << format_double(lax_rep.full[i - 1]);
      else
        target.stream() << ",,";
      target.stream() << "\n";
    }
  }
  err << "obstructed=" << (rep.obstructed ? "true" : "false")
      << " kernel_variation=" << format_double(rep.kernel_variation)
      << " radial_drift=" << format_double(rep.radial_drift)
      << " max_residual_projected=" << format_double(lax_rep.max_projected)
      << " max_residual_full=" << format_double(lax_rep.max_full) << "\n";
  return 0;
}

inline int cmd_dump_operator(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  GradedGraph g = graph_from_config(cfg);
  JacobiOperator1D j;
  j.n_min = g.n_min();
  j.a.resize(g.window_size() - 1);
  j.b.resize(g.window_size());
  if (cfg.random_jacobi) {
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> offd(0.2, 2.0), diag(-1.0, 1.0);
    for (Eigen::Index i = 0; i < j.a.size(); ++i) j.a(i) = offd(rng);
    for (Eigen::Index i = 0; i < j.b.size(); ++i) j.b(i) = diag(rng);
  } else {
    j.a.setConstant(cfg.a_const);
    j.b.setConstant(cfg.b_const);
  }
  Eigen::MatrixXd m;
  if (cfg.op == "lifted") m = lift_jacobi(j, g).dense();
  else if (cfg.op == "prad") m = radial_lax(lax_from_jacobi(j), g).mat;
  else if (cfg.op == "averaging") m = averaging_matrix(g);
  else if (cfg.op == "coaveraging") m = coaveraging_matrix(g);
  else if (cfg.op == "projector") m = radial_projector_matrix(g);
  else fail(ErrorCode::ParseError, "unknown operator '" + cfg.op + "'");

  OutputTarget target(cfg.out, out);
  const std::string hash = config_hash(cfg, "dump-operator");
  if (cfg.emit_spectrum) {
    if (m.rows() != m.cols() || cfg.op == "prad")
      fail(ErrorCode::ParseError, "--spectrum needs a weighted self-adjoint square operator");
    Eigen::VectorXd ev = spectrum(wrap_operator(m, g));
    if (cfg.format == "json") {
      nlohmann::json jj = json_header(hash);
      jj["eigenvalues"] = std::vector<double>(ev.begin(), ev.end());
      target.stream() << jj.dump(2) << "\n";
    } else {
      csv_header(target.stream(), hash);
      target.stream() << "index,eigenvalue\n";
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        target.stream() << i << "," << format_double(ev(i)) << "\n";
    }
    return 0;
  }
  if (cfg.format == "json") {
    nlohmann::json jj = json_header(hash);
    jj["rows"] = m.rows();
    jj["cols"] = m.cols();
    jj["entries"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0.0) jj["entries"].push_back({r, c, m(r, c)});
    target.stream() << jj.dump(2) << "\n";
  } else {
    csv_header(target.stream(), hash);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0.0)
          target.stream() << r << " " << c << " " << format_double(m(r, c)) << "\n";
  }
  return 0;
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("config file: ") + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("graph", cfg.graph_file);
  get("builtin", cfg.builtin);
  get("window", cfg.window);
  get("level", cfg.level);
  get("period", cfg.period);
  get("potential", cfg.potential);
  get("init", cfg.init);
  get("t_end", cfg.t_end);
  get("step", cfg.step);
  get("stride", cfg.stride);
  get("blow_up_bound", cfg.blow_up_bound);
  get("vars", cfg.vars);
  get("delta", cfg.delta);
  get("tol", cfg.tol);
  get("kappa", cfg.kappa);
  get("gamma", cfg.gamma);
  get("sigma", cfg.sigma);
  get("q0", cfg.q0);
  get("t", cfg.snapshot_t);
  get("operator", cfg.op);
  get("out", cfg.out);
  get("format", cfg.format);
  get("seed", cfg.seed);
}

}  // namespace cli_detail

// Parses argv-style arguments (without the program name) and runs the
// requested subcommand. CSV/JSON data goes to --out ('-' = `out`); summary and
// error lines go to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  // flags override config-file values, so load the file first
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      try {
        cli_detail::load_config_file(args[i + 1], cfg);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_of(e.code());
      }
    }

  CLI::App app{"nonlinear Hamiltonian lattice dynamics on weighted Z-graded graphs"};
  app.require_subcommand(1);
  std::string config_dummy;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_dummy, "JSON config file (flags override it)");
    sub->add_option("--graph", cfg.graph_file, "graph-definition JSON file");
    sub->add_option("--builtin", cfg.builtin, "builtin family: path|ladder|diamond|periodic");
    sub->add_option("--window", cfg.window, "rank window a:b");
    sub->add_option("--level", cfg.level, "diamond level");
    sub->add_option("--period", cfg.period, "periodic family period (2 or 4)");
    sub->add_option("--out", cfg.out, "output path, or - for stdout");
    sub->add_option("--format", cfg.format, "csv|json");
    sub->add_option("--seed", cfg.seed, "seed for randomized inputs");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check the graph assumptions");
  add_common(validate_cmd);
  validate_cmd->add_option("--delta", cfg.delta, "uniform mass lower bound");
  validate_cmd->add_option("--tol", cfg.tol, "absolute tolerance");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate the graph dynamics");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--potential", cfg.potential, "toda|harmonic");
  simulate_cmd->add_option("--init", cfg.init, "equilibrium | soliton:<spec> | <file.json>");
  simulate_cmd->add_option("--t-end", cfg.t_end, "integration horizon");
  simulate_cmd->add_option("--step", cfg.step, "RK4 step");
  simulate_cmd->add_option("--stride", cfg.stride, "sample every k steps");
  simulate_cmd->add_option("--blow-up-bound", cfg.blow_up_bound, "abort when |state| exceeds");
  simulate_cmd->add_option("--vars", cfg.vars, "phase|flaschka output variables");

  CLI::App* soliton_cmd = app.add_subcommand("soliton", "closed-form N-soliton snapshot");
  add_common(soliton_cmd);
  soliton_cmd->add_option("--N", cfg.n_solitons, "soliton count (cross-checked against the lists)");
  soliton_cmd->add_option("--kappa", cfg.kappa, "kappa list, ';'-separated");
  soliton_cmd->add_option("--gamma", cfg.gamma, "gamma list");
  soliton_cmd->add_option("--sigma", cfg.sigma, "sign list (+1/-1)");
  soliton_cmd->add_option("--q0", cfg.q0, "offset");
  soliton_cmd->add_option("--t", cfg.snapshot_t, "snapshot time");

  CLI::App* lift_cmd = app.add_subcommand("lift-compare", "chain vs lifted graph run");
  add_common(lift_cmd);
  lift_cmd->add_option("--init", cfg.init, "soliton:<spec> | equilibrium");
  lift_cmd->add_option("--potential", cfg.potential, "toda|harmonic (non-soliton runs)");
  lift_cmd->add_option("--t-end", cfg.t_end, "integration horizon");
  lift_cmd->add_option("--step", cfg.step, "RK4 step");
  lift_cmd->add_option("--stride", cfg.stride, "sample every k steps");

  CLI::App* lax_cmd = app.add_subcommand("lax-check", "spectra and radial Lax residuals");
  add_common(lax_cmd);
  lax_cmd->add_option("--init", cfg.init, "equilibrium | soliton:<spec> | <file.json>");
  lax_cmd->add_option("--t-end", cfg.t_end, "integration horizon");
  lax_cmd->add_option("--step", cfg.step, "RK4 step");
  lax_cmd->add_option("--stride", cfg.stride, "sample every k steps");

  CLI::App* dump_cmd = app.add_subcommand("dump-operator", "coordinate-format operator dump");
  add_common(dump_cmd);
  dump_cmd->add_option("--operator", cfg.op, "lifted|prad|averaging|coaveraging|projector");
  dump_cmd->add_option("--a-const", cfg.a_const, "constant Jacobi off-diagonal");
  dump_cmd->add_option("--b-const", cfg.b_const, "constant Jacobi diagonal");
  dump_cmd->add_flag("--random-jacobi", cfg.random_jacobi, "seeded random Jacobi data");
  dump_cmd->add_flag("--spectrum", cfg.emit_spectrum, "emit (index, eigenvalue) instead of entries");

  std::vector<std::string> argv_store;
  argv_store.push_back("graded-toda");
  for (const auto& a : args) argv_store.push_back(a);
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return cli_detail::cmd_validate(cfg, out, err);
    if (simulate_cmd->parsed()) return cli_detail::cmd_simulate(cfg, out, err);
    if (soliton_cmd->parsed()) return cli_detail::cmd_soliton(cfg, out, err);
    if (lift_cmd->parsed()) return cli_detail::cmd_lift_compare(cfg, out, err);
    if (lax_cmd->parsed()) return cli_detail::cmd_lax_check(cfg, out, err);
    if (dump_cmd->parsed()) return cli_detail::cmd_dump_operator(cfg, out, err);
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_of(e.code());
  }
  err << "usage error: no subcommand\n";
  return 2;
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_CLI_HPP
