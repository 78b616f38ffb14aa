// Command-line front end: solve instances, certify points and sequences,
// manage the built-in corpus.  Every number printed here comes from a
// library call; this file only does I/O and flag plumbing.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nsdp/nsdp.hpp>

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nsdp::ProblemInstance load_instance(const std::string& path) {
  const std::string prefix = "corpus:";
  if (path.rfind(prefix, 0) == 0)
    return nsdp::corpus_instance(path.substr(prefix.size()));
  return nsdp::parse_instance(read_file(path));
}

Eigen::VectorXd json_vector(const ordered_json& j, int len,
                            const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != len)
    throw std::invalid_argument(what + ": expected array of length " +
                                std::to_string(len));
  Eigen::VectorXd v(len);
  for (int i = 0; i < len; ++i) {
    if (!j.at(i).is_number())
      throw std::invalid_argument(what + ": expected numbers");
    v[i] = j.at(i).get<double>();
  }
  return v;
}

nsdp::Iterate parse_point(const std::string& text,
                          const nsdp::ProblemInstance& inst,
                          const std::string& what) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(what + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("x"))
    throw std::invalid_argument(what + ": missing key 'x'");
  nsdp::Iterate it;
  it.x = json_vector(j.at("x"), inst.n, what + ".x");
  it.mu = Eigen::VectorXd::Zero(inst.p);
  if (j.contains("mu")) it.mu = json_vector(j.at("mu"), inst.p, what + ".mu");
  it.omega = nsdp::SymMatrix(inst.m);
  const char* omega_key =
      j.contains("omega") ? "omega" : (j.contains("Omega") ? "Omega" : nullptr);
  if (omega_key != nullptr) {
    const auto& o = j.at(omega_key);
    const std::size_t want = nsdp::SymMatrix::packed_size(inst.m);
    if (!o.is_array() || o.size() != want)
      throw std::invalid_argument(what + ".omega: expected " +
                                  std::to_string(want) + " packed entries");
    std::vector<double> packed(want);
    for (std::size_t k = 0; k < want; ++k) packed[k] = o.at(k).get<double>();
    it.omega = nsdp::SymMatrix(inst.m, std::move(packed));
  }
  if (j.contains("rho")) it.rho = j.at("rho").get<double>();
  if (j.contains("eps")) it.eps = j.at("eps").get<double>();
  return it;
}

int status_exit_code(nsdp::SolveStatus s) {
  switch (s) {
    case nsdp::SolveStatus::converged: return 0;
    case nsdp::SolveStatus::infeasible_stationary: return 2;
    default: return 3;
  }
}

int cmd_solve(const std::string& path, const nsdp::SolverConfig& cfg,
              const std::string& out, const std::string& x0_csv) {
  nsdp::ProblemInstance inst = load_instance(path);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(inst.n);
  if (!x0_csv.empty()) {
    std::stringstream ss(x0_csv);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != inst.n)
      throw std::invalid_argument("--x0: expected " + std::to_string(inst.n) +
                                  " comma-separated values");
    for (int i = 0; i < inst.n; ++i) x0[i] = vals[i];
  }
  nsdp::SolverTrace trace = nsdp::run_penalty(inst, x0, cfg);
  const std::string text = nsdp::trace_to_jsonl(trace);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream of(out, std::ios::binary);
    if (!of) throw std::runtime_error("cannot open '" + out + "' for writing");
    of << text;
  }
  return status_exit_code(trace.status);
}

struct CertifyOpts {
  std::string point_path;
  std::string ref_path;
  std::string seq_path;
  bool wcr = false;
  bool robinson = false;
  double tol = 1e-6;
  double radius = 1e-3;
  int samples = 50;
  unsigned long seed = 0;
};

int cmd_certify(const std::string& path, const CertifyOpts& opts) {
  nsdp::ProblemInstance inst = load_instance(path);
  if (opts.point_path.empty() && opts.seq_path.empty())
    throw std::invalid_argument("certify: provide --point or --seq");

  Eigen::VectorXd x_ref;
  bool have_ref = false;
  if (!opts.ref_path.empty()) {
    x_ref = parse_point(read_file(opts.ref_path), inst, "ref").x;
    have_ref = true;
  }

  if (!opts.seq_path.empty()) {
    std::istringstream in(read_file(opts.seq_path));
    std::vector<nsdp::Iterate> seq;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      nsdp::Iterate it =
          parse_point(line, inst, "seq line " + std::to_string(lineno));
      it.k = static_cast<int>(seq.size());
      seq.push_back(std::move(it));
    }
    if (seq.empty()) throw std::invalid_argument("seq: no points");
    if (!have_ref) x_ref = seq.back().x;

    double codecay = 0.0;
    nsdp::ResidualReport last;
    for (const nsdp::Iterate& it : seq) {
      nsdp::ResidualReport rep = nsdp::residual_report(inst, it, x_ref);
      std::cout << nsdp::report_to_json(rep).dump() << "\n";
      const double delta =
          std::max(rep.compl_cakkt, rep.feas_eq + rep.feas_cone);
      codecay = std::max(codecay,
                         rep.compl_akkt / std::sqrt(std::max(delta, 1e-300)));
      last = rep;
    }
    ordered_json summary;
    summary["count"] = seq.size();
    summary["feas_eq"] = last.feas_eq;
    summary["feas_cone"] = last.feas_cone;
    summary["stationarity"] = last.stationarity;
    summary["compl_cakkt"] = last.compl_cakkt;
    summary["compl_akkt"] = last.compl_akkt;
    summary["akkt_codecay_constant"] = codecay;
    ordered_json wrap;
    wrap["summary"] = std::move(summary);
    std::cout << wrap.dump() << "\n";
  } else {
    nsdp::Iterate it = parse_point(read_file(opts.point_path), inst, "point");
    if (!have_ref) x_ref = it.x;
    nsdp::ResidualReport rep = nsdp::residual_report(inst, it, x_ref);
    std::cout << nsdp::report_to_json(rep).dump() << "\n";
  }

  if (opts.wcr) {
    nsdp::WcrReport w = nsdp::wcr_diagnostic(inst, x_ref, opts.radius,
                                             opts.samples, nsdp::kDefaultRankTol,
                                             opts.seed);
    ordered_json wrap;
    wrap["wcr"] = nsdp::wcr_to_json(w);
    std::cout << wrap.dump() << "\n";
  }
  if (opts.robinson) {
    nsdp::RobinsonReport r = nsdp::robinson_diagnostic(inst, x_ref, opts.tol);
    ordered_json wrap;
    wrap["robinson"] = nsdp::robinson_to_json(r);
    std::cout << wrap.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense nonlinear semidefinite programming toolkit"};
  app.require_subcommand(1);

  std::string solve_path, solve_out, solve_x0;
  nsdp::SolverConfig cfg;
  auto* solve = app.add_subcommand("solve", "Run the penalty solver");
  solve->add_option("path", solve_path, "Instance file or corpus:NAME")
      ->required();
  solve->add_option("--rho0", cfg.rho0, "Initial penalty parameter");
  solve->add_option("--rho-mult", cfg.rho_mult, "Penalty growth factor");
  solve->add_option("--eps0", cfg.eps0, "Initial inner tolerance");
  solve->add_option("--eps-mult", cfg.eps_mult, "Inner tolerance decay");
  solve->add_option("--tol,--tol-outer", cfg.tol_outer, "Outer tolerance");
  solve->add_option("--max-outer", cfg.max_outer, "Outer iteration budget");
  solve->add_option("--max-inner", cfg.max_inner, "Inner iteration budget");
  solve->add_option("--armijo-c", cfg.armijo_c, "Armijo constant");
  solve->add_option("--backtrack", cfg.backtrack, "Backtracking factor");
  solve->add_option("--curvature-step", cfg.curvature_step,
                    "Initial curvature step length");
  solve->add_option("--inner-polish", cfg.inner_polish,
                    "Gradient polish target once the inner solver steps");
  solve->add_option("--seed", cfg.seed, "Random seed");
  solve->add_option("--x0", solve_x0, "Comma-separated start point");
  solve->add_option("--out", solve_out, "Trace output file (default stdout)");

  std::string cert_path;
  CertifyOpts copts;
  auto* certify =
      app.add_subcommand("certify", "Evaluate optimality residuals");
  certify->add_option("path", cert_path, "Instance file or corpus:NAME")
      ->required();
  certify->add_option("--point", copts.point_path, "Point file (JSON)");
  certify->add_option("--ref", copts.ref_path, "Reference point file");
  certify->add_option("--seq", copts.seq_path, "Point sequence (JSON lines)");
  certify->add_flag("--wcr", copts.wcr, "Run the constant-rank diagnostic");
  certify->add_flag("--robinson", copts.robinson,
                    "Run the Robinson CQ diagnostic");
  certify->add_option("--tol", copts.tol, "Residual tolerance");
  certify->add_option("--radius", copts.radius, "Sampling ball radius");
  certify->add_option("--samples", copts.samples, "Sample count");
  certify->add_option("--seed", copts.seed, "Random seed");

  auto* corpus = app.add_subcommand("corpus", "Built-in instances");
  auto* corpus_list = corpus->add_subcommand("list", "List instance names");
  std::string show_name;
  auto* corpus_show = corpus->add_subcommand("show", "Print an instance");
  corpus_show->add_option("name", show_name, "Instance name")->required();
  std::string export_name, export_path;
  auto* corpus_export = corpus->add_subcommand("export", "Write an instance");
  corpus_export->add_option("name", export_name, "Instance name")->required();
  corpus_export->add_option("path", export_path, "Output file")->required();
  corpus->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_path, cfg, solve_out, solve_x0);
    if (certify->parsed()) return cmd_certify(cert_path, copts);
    if (corpus_list->parsed()) {
      for (const auto& nm : nsdp::corpus_names()) std::cout << nm << "\n";
      return 0;
    }
    if (corpus_show->parsed()) {
      std::cout << nsdp::serialize_instance(nsdp::corpus_instance(show_name));
      return 0;
    }
    if (corpus_export->parsed()) {
      std::ofstream of(export_path, std::ios::binary);
      if (!of)
        throw std::runtime_error("cannot open '" + export_path +
                                 "' for writing");
      of << nsdp::serialize_instance(nsdp::corpus_instance(export_name));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
