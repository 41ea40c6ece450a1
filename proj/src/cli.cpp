#include "graphlaplace/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "graphlaplace/error.hpp"
#include "graphlaplace/fractional.hpp"
#include "graphlaplace/function_io.hpp"
#include "graphlaplace/graph_io.hpp"
#include "graphlaplace/sampler.hpp"
#include "graphlaplace/spectral.hpp"
#include "graphlaplace/verify.hpp"

namespace graphlaplace {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::RootScanExhausted:
    case ErrorCode::IllConditionedCluster:
    case ErrorCode::SingularSystem:
    case ErrorCode::QuadratureFailure:
    case ErrorCode::InsufficientGrid:
    case ErrorCode::InsufficientDecay:
      return kExitNumeric;
    default:
      return kExitConfig;
  }
}

json config_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["graph"] = c.graph_path;
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["kappa"] = c.kappa;
  j["truncation"] = c.truncation ? json(*c.truncation) : json(nullptr);
  j["solver"] = c.solver;
  j["mesh"] = c.mesh;
  j["eigenfunctions"] = c.eigenfunctions;
  j["grid"] = c.grid;
  j["function"] = c.function_path;
  j["space"] = c.space;
  j["alpha"] = c.alpha;
  j["p"] = c.p;
  j["beta_report"] = c.beta_report ? json(*c.beta_report) : json(nullptr);
  j["n_samples"] = c.n_samples;
  j["probes"] = c.probes;
  j["verify_samples"] = c.verify_samples;
  return j;
}

class Session {
 public:
  Session(RunConfig cfg, std::ostream& out, std::ostream& err) : cfg_(std::move(cfg)), out_(out), err_(err) {}

  RunConfig& config() { return cfg_; }
  std::ostream& out() { return out_; }

  void trace(const std::string& msg) {
    if (!cfg_.debug) return;
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    err_ << "[debug " << format_double(std::round(t * 1e3) / 1e3) << "s] " << msg << "\n";
  }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(cfg_.out_dir);
    std::ofstream f(fs::path(cfg_.out_dir) / name, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorCode::ConfigParse, "cli", "cannot write '" + (fs::path(cfg_.out_dir) / name).string() + "'");
    outputs_.push_back(name);
    trace("wrote " + name);
  }

  void manifest(int code, const std::string& status, const json& error = nullptr) {
    json m;
    m["tool"] = "graphlaplace";
    m["version"] = GRAPHLAPLACE_VERSION;
    m["config"] = config_json(cfg_);
    m["outputs"] = outputs_;
    m["status"] = status;
    m["exit_code"] = code;
    m["error"] = error;
    try {
      fs::create_directories(cfg_.out_dir);
      std::ofstream f(fs::path(cfg_.out_dir) / "manifest.json", std::ios::binary);
      f << m.dump(2) << "\n";
    } catch (const fs::filesystem_error& e) {
      err_ << "warning: could not write manifest: " << e.what() << "\n";
    }
  }

 private:
  RunConfig cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::BadArgument, "cli", msg);
}

GraphPoint parse_point(const MetricGraph& g, const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ConfigParse, "cli", "point '" + s + "' is not edge:t");
  const auto e = g.find_edge(s.substr(0, colon));
  if (!e) throw Error(ErrorCode::ConfigParse, "cli", "point '" + s + "': unknown edge '" + s.substr(0, colon) + "'");
  double t = 0.0;
  try {
    std::size_t used = 0;
    t = std::stod(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigParse, "cli", "point '" + s + "': bad coordinate");
  }
  const GraphPoint x{*e, t};
  g.check_point(x);
  return x;
}

std::pair<GraphPoint, GraphPoint> parse_probe(const MetricGraph& g, const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ConfigParse, "cli", "probe '" + s + "' is not x,y");
  return {parse_point(g, s.substr(0, comma)), parse_point(g, s.substr(comma + 1))};
}

std::string point_string(const MetricGraph& g, const GraphPoint& x) {
  return g.edge(x.edge).name + "," + format_double(x.t);
}

std::size_t truncation_or(const RunConfig& c, std::size_t fallback) {
  const std::size_t n = c.truncation.value_or(fallback);
  require(n > 0, "--truncation must be positive");
  return n;
}

std::shared_ptr<const SpectralBasis> secular_basis(Session& s, const GraphFile& gf, std::size_t n) {
  s.trace("secular eigensolve, N = " + std::to_string(n));
  auto b = std::make_shared<const SpectralBasis>(secular_eigensolve(gf.graph, s.config().kappa, gf.conditions, n));
  s.trace("eigensolve done, lambda_N = " + format_double(b->eigenvalues.back()));
  return b;
}

int cmd_validate(Session& s, const GraphFile& gf) {
  const MetricGraph& g = gf.graph;
  std::ostringstream os;
  os << "vertices = " << g.vertex_count() << "\nedges = " << g.edge_count() << "\n";
  os << "total_length = " << format_double(g.total_length()) << "\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    os << "vertex." << g.vertex_name(v) << " = degree " << g.degree(v) << ", " << describe(gf.conditions.at(v)) << "\n";
  }
  for (const Edge& e : g.edges()) {
    os << "edge." << e.name << " = " << g.vertex_name(e.tail) << " -> " << g.vertex_name(e.head) << ", length "
       << format_double(e.length) << (e.is_loop() ? ", loop" : "") << "\n";
  }
  s.write("graph.json", to_json(g, gf.conditions));
  s.write("validate_report.txt", os.str());
  s.out() << os.str();
  return kExitOk;
}

int cmd_eig(Session& s, const GraphFile& gf) {
  const RunConfig& c = s.config();
  const std::size_t n = truncation_or(c, 20);
  std::shared_ptr<const SpectralBasis> basis;
  if (c.solver == "secular") {
    basis = secular_basis(s, gf, n);
  } else if (c.solver == "fem") {
    s.trace("FEM eigensolve, h = " + format_double(c.mesh));
    basis = std::make_shared<const SpectralBasis>(
        fem_eigensolve(gf.graph, CoefficientField::constant(gf.graph, c.kappa), gf.conditions, c.mesh, n));
  } else {
    throw Error(ErrorCode::BadArgument, "cli", "--solver must be 'secular' or 'fem'");
  }
  const SpectralBasis& b = *basis;
  std::string csv = "i,lambda,multiplicity_cluster,sup_norm,kirchhoff_residual_max\n";
  for (std::size_t i = 0; i < b.size(); ++i) {
    csv += std::to_string(i + 1) + "," + format_double(b.lambda(i)) + "," + std::to_string(b.multiplicity[i]) + "," +
           format_double(b.sup_norm(i)) + "," + format_double(kirchhoff_residual_max(b, i)) + "\n";
  }
  s.write("eigenvalues.csv", csv);
  if (c.eigenfunctions) {
    require(c.grid >= 2, "--grid must be at least 2");
    std::string ef = "i,edge_id,t,value\n";
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (EdgeId e = 0; e < gf.graph.edge_count(); ++e) {
        for (const GraphPoint& x : gf.graph.edge_grid(e, c.grid)) {
          ef += std::to_string(i + 1) + "," + point_string(gf.graph, x) + "," + format_double(b.phi(i).value(e, x.t)) + "\n";
        }
      }
    }
    s.write("eigenfunctions.csv", ef);
  }
  s.out() << csv;
  return kExitOk;
}

std::string norm_line(const std::string& name, const NormEstimate& n) {
  return name + " = " + format_double(n.value) + "\n" + name + ".tail_sq_estimate = " + format_double(n.tail_sq) +
         "\n" + name + ".tail_divergent = " + (n.tail_divergent ? "true" : "false") + "\n" + name +
         ".truncation = " + std::to_string(n.truncation) + "\n";
}

std::string regularity_text(const MetricGraph& g, const SpectralCoefficients& c, double alpha,
                            const std::optional<PiecewiseFunction>& source) {
  try {
    return regularity_report(c, alpha, source).to_text(g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ExceptionalOrder) throw;
    return "alpha_target = " + format_double(alpha) + "\nverdict = suppressed (exceptional order k + 1/2)\n";
  }
}

int cmd_norm(Session& s, const GraphFile& gf) {
  const RunConfig& c = s.config();
  require(!c.function_path.empty(), "norm needs --function");
  const PiecewiseFunction f = load_function_csv(gf.graph, c.function_path);
  std::ostringstream os;
  if (c.space == "W") {
    s.trace("W norm, alpha = " + format_double(c.alpha) + ", p = " + format_double(c.p));
    const SobolevNorm n = sobolev_norm_W(gf.graph, f, c.alpha, c.p);
    os << "space = W\nnorm = " << format_double(n.value) << "\nnorm.converged = " << (n.converged ? "true" : "false")
       << "\nedge_part = " << format_double(n.edge_part) << "\nglobal_part = " << format_double(n.global_part) << "\n";
    os << membership_report_W(gf.graph, f, c.alpha, c.p).to_text(gf.graph);
  } else if (c.space == "H") {
    const auto basis = secular_basis(s, gf, truncation_or(c, 100));
    const SpectralCoefficients coeffs = project(f, basis);
    os << "space = H\n" << norm_line("norm", dot_h_norm(coeffs, c.alpha));
    os << regularity_text(gf.graph, coeffs, c.alpha, f);
  } else {
    throw Error(ErrorCode::BadArgument, "cli", "--space must be 'W' or 'H'");
  }
  s.write("norm_report.txt", os.str());
  s.out() << os.str();
  return kExitOk;
}

int cmd_solve(Session& s, const GraphFile& gf) {
  const RunConfig& c = s.config();
  require(!c.function_path.empty(), "solve needs --function");
  require(c.grid >= 2, "--grid must be at least 2");
  const PiecewiseFunction f = load_function_csv(gf.graph, c.function_path);
  const auto basis = secular_basis(s, gf, truncation_or(c, 100));
  const SpectralCoefficients fc = project(f, basis);
  const SpectralCoefficients uc = solve_fractional(fc, c.alpha);
  const PiecewiseFunction u = synthesize(uc);
  s.write("u.csv", function_csv(gf.graph, u, c.grid));
  const double beta = c.beta_report.value_or(c.alpha);
  std::ostringstream os;
  os << "alpha = " << format_double(c.alpha) << "\nbeta_report = " << format_double(beta) << "\n";
  os << "truncation = " << uc.truncation() << "\n";
  os << norm_line("f.L2", dot_h_norm(fc, 0.0));
  os << norm_line("u.L2", dot_h_norm(uc, 0.0));
  os << norm_line("u.H_beta", dot_h_norm(uc, beta));
  os << regularity_text(gf.graph, uc, beta, std::nullopt);
  s.write("solve_report.txt", os.str());
  s.out() << os.str();
  return kExitOk;
}

// Smallest N with (lambda_N / lambda_1)^{-(alpha - 1/2)} < 1e-3, lambda_N from
// the Weyl-type estimate kappa^2 + (pi N / L)^2.
std::size_t default_sample_truncation(const MetricGraph& g, double kappa, double lambda1, double alpha) {
  const double target = lambda1 * std::pow(1e3, 1.0 / (alpha - 0.5)) - kappa * kappa;
  const double n = std::ceil(g.total_length() / std::numbers::pi * std::sqrt(std::max(target, 0.0)));
  return static_cast<std::size_t>(std::clamp(n, 10.0, 2000.0));
}

int cmd_sample(Session& s, const GraphFile& gf) {
  RunConfig& c = s.config();
  require(c.grid >= 2, "--grid must be at least 2");
  require(c.n_samples > 0, "--n-samples must be positive");
  if (!c.truncation) {
    if (!(c.alpha > 0.5)) {
      throw Error(ErrorCode::BadArgument, "cli", "alpha <= 1/2 has no convergent default truncation; pass --truncation");
    }
    const double l1 = secular_eigensolve(gf.graph, c.kappa, gf.conditions, 1).lambda(0);
    c.truncation = default_sample_truncation(gf.graph, c.kappa, l1, c.alpha);
    s.trace("default truncation N = " + std::to_string(*c.truncation));
  }
  std::vector<std::pair<GraphPoint, GraphPoint>> probes;
  for (const auto& p : c.probes) probes.push_back(parse_probe(gf.graph, p));
  const auto basis = secular_basis(s, gf, *c.truncation);
  const auto fields = sample_fields(basis, c.alpha, c.seed, c.n_samples);
  s.trace("sampled " + std::to_string(fields.size()) + " fields");

  std::string csv = "sample,edge_id,t,value\n";
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const PiecewiseFunction u = synthesize(fields[k].coeffs);
    for (EdgeId e = 0; e < gf.graph.edge_count(); ++e) {
      for (const GraphPoint& x : gf.graph.edge_grid(e, c.grid)) {
        csv += std::to_string(k) + "," + point_string(gf.graph, x) + "," + format_double(u.value(e, x.t)) + "\n";
      }
    }
  }
  s.write("samples.csv", csv);

  std::string stats =
      "probe,x_edge,x_t,y_edge,y_t,empirical,ci_half_width,series,series_tail_bound,within_ci\n";
  const bool formal = !(c.alpha > 0.5);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& [x, y] = probes[k];
    const EmpiricalCovariance e = empirical_covariance(fields, x, y);
    stats += std::to_string(k) + "," + point_string(gf.graph, x) + "," + point_string(gf.graph, y) + "," +
             format_double(e.covariance) + "," + format_double(e.ci_half_width) + ",";
    if (formal) {
      stats += "nan,nan,formal\n";  // pointwise covariance does not exist
      continue;
    }
    const CovarianceEstimate cs = covariance_series(*basis, c.alpha, x, y);
    stats += format_double(cs.value) + "," + format_double(cs.tail_bound) + "," +
             (std::abs(e.covariance - cs.value) <= e.ci_half_width ? "true" : "false") + "\n";
  }
  s.write("sample_stats.csv", stats);
  s.out() << "samples = " << fields.size() << "\ntruncation = " << *c.truncation
          << "\nformal = " << (formal ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_verify(Session& s, const GraphFile& gf) {
  const RunConfig& c = s.config();
  VerifyOptions opt;
  opt.kappa = c.kappa;
  opt.n = truncation_or(c, 80);
  opt.seed = c.seed;
  opt.samples = c.verify_samples;
  const auto rows = verify_suite(gf.graph, gf.conditions, opt);
  std::string csv = "module,check,value,threshold,pass,note\n";
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    csv += r.module + "," + r.name + "," + format_double(r.value) + "," + format_double(r.threshold) + "," +
           (r.pass ? "pass" : "FAIL") + ",\"" + r.note + "\"\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-15s %-30s %-4s  value=%-12.4g threshold=%.4g", r.module.c_str(),
                  r.name.c_str(), r.pass ? "pass" : "FAIL", r.value, r.threshold);
    s.out() << line << (r.note.empty() ? "" : "  (" + r.note + ")") << "\n";
  }
  s.write("verify.csv", csv);
  s.out() << (all ? "all checks passed" : "verification FAILED") << "\n";
  return all ? kExitOk : kExitVerify;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Session s(config, out, err);
  RunConfig& c = s.config();
  if (c.threads == 0) {
    if (const char* env = std::getenv("GRAPHLAPLACE_THREADS")) {
      try {
        c.threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        err << "error [cli/ConfigParse]: GRAPHLAPLACE_THREADS='" << env << "' is not a thread count\n";
        s.manifest(kExitConfig, "error", {{"code", "ConfigParse"}, {"module", "cli"}, {"message", "bad GRAPHLAPLACE_THREADS"}});
        return kExitConfig;
      }
    }
  }
  set_thread_limit(c.threads);
  s.trace("threads = " + std::to_string(thread_limit()));
  try {
    const GraphFile gf = load_graph_file(c.graph_path);
    s.trace("loaded graph: " + std::to_string(gf.graph.vertex_count()) + " vertices, " +
            std::to_string(gf.graph.edge_count()) + " edges");
    int code = kExitOk;
    if (c.subcommand == "validate") code = cmd_validate(s, gf);
    else if (c.subcommand == "eig") code = cmd_eig(s, gf);
    else if (c.subcommand == "norm") code = cmd_norm(s, gf);
    else if (c.subcommand == "solve") code = cmd_solve(s, gf);
    else if (c.subcommand == "sample") code = cmd_sample(s, gf);
    else if (c.subcommand == "verify") code = cmd_verify(s, gf);
    else throw Error(ErrorCode::ConfigParse, "cli", "unknown subcommand '" + c.subcommand + "'");
    s.manifest(code, code == kExitOk ? "ok" : "verification_failed");
    return code;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << "error [" << e.module() << "/" << to_string(e.code()) << "]: " << e.what() << "\n";
    if (c.debug) err << "[debug] resolved config:\n" << config_json(c).dump(2) << "\n";
    s.manifest(code, "error", {{"code", std::string(to_string(e.code()))}, {"module", e.module()}, {"message", e.what()}});
    return code;
  } catch (const std::exception& e) {
    err << "error [cli/internal]: " << e.what() << "\n";
    s.manifest(kExitNumeric, "error", {{"code", "Internal"}, {"module", "cli"}, {"message", e.what()}});
    return kExitNumeric;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Laplacians, Sobolev spaces and Gaussian fields on compact metric graphs"};
  app.set_version_flag("--version", std::string(GRAPHLAPLACE_VERSION));
  app.require_subcommand(1);
  RunConfig c;
  std::size_t truncation = 0;
  double beta = std::nan("");

  app.add_option("--out,-o", c.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker cap (0: GRAPHLAPLACE_THREADS or hardware)")->capture_default_str();
  app.add_flag("--debug", c.debug, "Trace progress and dump the resolved config on errors");

  auto graph_arg = [&](CLI::App* sub) {
    sub->add_option("graph", c.graph_path, "Graph spec (JSON)")->required();
    sub->fallthrough();
  };
  auto basis_opts = [&](CLI::App* sub, const char* help) {
    sub->add_option("--kappa", c.kappa, "Mass parameter kappa")->capture_default_str();
    sub->add_option("--truncation,-N", truncation, help);
  };

  auto* validate = app.add_subcommand("validate", "Parse and check a graph spec");
  graph_arg(validate);

  auto* eig = app.add_subcommand("eig", "Eigenpairs of kappa^2 - Laplacian");
  graph_arg(eig);
  basis_opts(eig, "Number of eigenpairs (default 20)");
  eig->add_option("--solver", c.solver, "secular | fem")->capture_default_str();
  eig->add_option("--mesh", c.mesh, "FEM mesh size")->capture_default_str();
  eig->add_flag("--eigenfunctions", c.eigenfunctions, "Also write eigenfunctions.csv");
  eig->add_option("--grid", c.grid, "Nodes per edge for eigenfunctions.csv")->capture_default_str();

  auto* norm = app.add_subcommand("norm", "Sobolev norms and membership diagnostics of a sampled function");
  graph_arg(norm);
  basis_opts(norm, "Eigenpairs for --space H (default 100)");
  norm->add_option("--function,-f", c.function_path, "Function CSV (edge_id,t,value)")->required();
  norm->add_option("--space", c.space, "W (Sobolev-Slobodeckij) | H (spectral)")->capture_default_str();
  norm->add_option("--alpha", c.alpha, "Smoothness order")->capture_default_str();
  norm->add_option("--p", c.p, "Integrability exponent (W only)")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "Solve L^{alpha/2} u = f spectrally");
  graph_arg(solve);
  basis_opts(solve, "Eigenpairs (default 100)");
  solve->add_option("--function,-f", c.function_path, "Right-hand side CSV (edge_id,t,value)")->required();
  solve->add_option("--alpha", c.alpha, "Fractional order")->capture_default_str();
  solve->add_option("--beta-report", beta, "Order of the regularity report (default alpha)");
  solve->add_option("--grid", c.grid, "Nodes per edge in u.csv")->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Sample the Whittle-Matern field L^{-alpha/2} W");
  graph_arg(sample);
  basis_opts(sample, "Eigenpairs (default: relative tail below 1e-3)");
  sample->add_option("--alpha", c.alpha, "Smoothness parameter")->capture_default_str();
  sample->add_option("--n-samples", c.n_samples, "Number of samples")->capture_default_str();
  sample->add_option("--probe", c.probes, "Covariance probe pair edge:t,edge:t (repeatable)");
  sample->add_option("--grid", c.grid, "Nodes per edge in samples.csv")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run the invariant suite of every module");
  graph_arg(verify);
  basis_opts(verify, "Eigenpairs (default 80)");
  verify->add_option("--samples", c.verify_samples, "Monte Carlo samples for the sampler checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  if (truncation != 0) c.truncation = truncation;
  if (!std::isnan(beta)) c.beta_report = beta;
  return run(c, std::cout, std::cerr);
}

}  // namespace graphlaplace
