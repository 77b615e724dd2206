#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "polarcone/polarcone.hpp"

#ifndef POLARCONE_VERSION
#define POLARCONE_VERSION "0.0.0"
#endif

namespace polarcone::cli {

namespace {

using io::json;

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

class Diagnostics {
 public:
  explicit Diagnostics(std::ostream& err, const std::string& command) : err_(err) {
    line_ << "command=" << command;
  }
  template <class T>
  Diagnostics& kv(const char* key, const T& value) {
    line_ << ' ' << key << '=' << value;
    return *this;
  }
  Diagnostics& kv(const char* key, double value) {
    line_ << ' ' << key << '=' << io::format_double(value);
    return *this;
  }
  Diagnostics& kv(const char* key, bool value) {
    line_ << ' ' << key << '=' << (value ? "true" : "false");
    return *this;
  }
  ~Diagnostics() { err_ << line_.str() << '\n'; }

 private:
  std::ostream& err_;
  std::ostringstream line_;
};

// Writes to a file, or to `out` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
      os_ = &out;
    } else {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::Parse, "cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void finish() {
    os_->flush();
    if (!*os_) throw Error(ErrorCode::Parse, "write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void write_json(const std::string& path, std::ostream& out, const json& j) {
  Sink sink(path, out);
  sink.stream() << j.dump(2) << '\n';
  sink.finish();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string("missing ") + flag);
}

int thread_cap() {
  if (const char* env = std::getenv("POLARCONE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

RepresentationProblem load_problem(const RunConfig& cfg) {
  require(cfg.input, "--input");
  auto problem = io::problem_from_json(io::read_json_file(cfg.input));
  if (cfg.no_identity_row) problem.include_identity_row = false;
  return problem;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.input, "--input");
  const auto state = io::sticky_state_from_json(io::read_json_file(cfg.input));
  std::vector<double> times = cfg.times;
  if (times.empty()) {
    if (cfg.steps < 1) throw Error(ErrorCode::InvalidArgument, "--steps must be positive");
    if (cfg.t_max < 0.0) throw Error(ErrorCode::NegativeTime, "negative time");
    for (int k = 0; k <= cfg.steps; ++k) times.push_back(cfg.t_max * k / cfg.steps);
  }
  Sink sink(cfg.output, out);
  io::write_trajectory_header(sink.stream());
  bool flagged = false;
  for (double t : times) {
    const auto snap = sticky_snapshot(state, t);
    flagged = flagged || snap.velocity_is_right_limit;
    io::write_trajectory_rows(sink.stream(), t, snap);
  }
  sink.finish();
  Diagnostics(err, "simulate").kv("particles", state.size()).kv("instants", times.size())
      .kv("right_limit_at_t0", flagged);
  return kOk;
}

int cmd_project(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.input, "--input");
  const auto j = io::read_json_file(cfg.input);
  std::vector<double> y, w;
  try {
    y = j.at("y").get<std::vector<double>>();
    w = j.contains("w") ? j.at("w").get<std::vector<double>>() : std::vector<double>(y.size(), 1.0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed projection input: ") + e.what());
  }
  const auto fit = isotonic_fit(y, w);
  json blocks = json::array();
  for (const auto& b : fit.blocks) blocks.push_back({b.begin, b.end});
  write_json(cfg.output, out, {{"x", fit.map.values()}, {"blocks", blocks}});
  Diagnostics(err, "project").kv("size", y.size()).kv("blocks", fit.blocks.size());
  return kOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.input, "--input");
  const auto j = io::read_json_file(cfg.input);
  PolarCertificate1D cert;
  if (j.contains("Y")) {
    std::vector<double> y, x, weights, atoms;
    try {
      y = j.at("Y").get<std::vector<double>>();
      x = j.at("X").get<std::vector<double>>();
      weights = j.at("weights").get<std::vector<double>>();
      atoms = j.contains("atoms") ? j.at("atoms").get<std::vector<double>>() : x;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, std::string("malformed certificate input: ") + e.what());
    }
    cert = polar_membership_1d(y, MonotoneMap1D(std::move(x)), DiscreteMeasure(atoms, weights));
  } else {
    const auto state = io::sticky_state_from_json(j);
    const double t = cfg.time.value_or(0.0);
    cert = polar_membership_1d(polar_residual(state, t), sticky_evolve(state, t), state.measure());
  }
  write_json(cfg.output, out, io::to_json(cert));
  Diagnostics(err, "certify").kv("feasible", cert.feasible).kv("inner_product", cert.inner_product)
      .kv("scale", cert.scale);
  return cert.feasible ? kOk : kCheckFailed;
}

int cmd_recover(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto problem = load_problem(cfg);
  SolverOptions opts = cfg.solver;
  opts.threads = thread_cap();
  const auto r = recover_stress(problem, opts);
  write_json(cfg.output, out, io::to_json(r));
  if (!cfg.csv.empty()) {
    std::ofstream csv(cfg.csv);
    if (!csv) throw Error(ErrorCode::Parse, "cannot write " + cfg.csv);
    io::write_stress_csv(csv, problem.grid, r.M);
  }
  Diagnostics(err, "recover").kv("status", to_string(r.status)).kv("iterations", r.iterations)
      .kv("residual_inf", r.residual_inf).kv("tol_rep", r.tol_rep).kv("min_eigenvalue", r.min_eigenvalue)
      .kv("total_trace", r.total_trace).kv("trace_budget", r.trace_budget).kv("polished", r.polished);
  return r.converged ? kOk : kSolverFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto problem = load_problem(cfg);
  require(cfg.result, "--result");
  const auto r = io::recovery_result_from_json(io::read_json_file(cfg.result));
  if (r.M.dim() != problem.grid.dim() || r.M.size() != problem.grid.cell_count()) {
    throw Error(ErrorCode::GridMismatch, "result does not live on the problem grid");
  }
  VerifyOptions vopts;
  vopts.seed = cfg.seed;
  const auto rep = verify_representation(r.M, problem, vopts);
  write_json(cfg.output, out, io::to_json(rep));
  Diagnostics(err, "verify").kv("passed", rep.passed()).kv("residual_inf", rep.residual_inf)
      .kv("min_eigenvalue", rep.min_eigenvalue).kv("total_trace", rep.total_trace)
      .kv("trace_budget", rep.trace_budget);
  return rep.passed() ? kOk : kCheckFailed;
}

std::vector<std::vector<SymMatrix>> gauge_arguments(const RunConfig& cfg, const Grid& grid) {
  const int d = grid.dim();
  std::vector<std::vector<SymMatrix>> vs;
  if (!cfg.v_path.empty()) {
    const auto j = io::read_json_file(cfg.v_path);
    const json list = j.is_array() ? j : json::array({j});
    for (const auto& item : list) {
      auto field = io::matrix_field_from_json(item, d);
      if (field.size() != grid.cell_count()) throw Error(ErrorCode::GridMismatch, "v has the wrong number of cells");
      vs.push_back(field.cells());
    }
    return vs;
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < cfg.count; ++k) {
    std::vector<SymMatrix> v(grid.cell_count());
    for (auto& c : v) {
      SymMatrix a(d, d);
      for (int i = 0; i < d; ++i)
        for (int jj = 0; jj < d; ++jj) a(i, jj) = normal(rng);
      c = (a + a.transpose()) / 2;
    }
    vs.push_back(std::move(v));
  }
  return vs;
}

int cmd_gauge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto problem = load_problem(cfg);
  std::optional<RecoveryResult> result;
  if (!cfg.result.empty()) result = io::recovery_result_from_json(io::read_json_file(cfg.result));
  GaugeOptions gopts;
  gopts.fast = cfg.fast;
  const auto vs = gauge_arguments(cfg, problem.grid);
  const double budget_scale = std::max(1.0, std::abs(problem.trace_budget()));

  Sink sink(cfg.output, out);
  int violations = 0;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    GaugeResult g;
    try {
      g = riedl_gauge(problem, vs[k], gopts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Inconsistent) throw;
      Diagnostics(err, "gauge").kv("error", to_string(e.code())).kv("message", quoted(e.what()));
      return kCheckFailed;
    }
    json line = {{"index", k}, {"p", g.value}, {"converged", g.converged}};
    if (result) {
      double vnorm = 0.0;
      for (const auto& c : vs[k]) vnorm = std::max(vnorm, c.norm());
      const double pairing = result->M.pair(vs[k]);
      const bool dominated = pairing <= g.value + 1e-6 * budget_scale * std::max(1.0, vnorm);
      violations += dominated ? 0 : 1;
      line["pairing"] = pairing;
      line["dominated"] = dominated;
    }
    sink.stream() << line.dump() << '\n';
  }
  sink.finish();
  Diagnostics(err, "gauge").kv("count", vs.size()).kv("fast", cfg.fast).kv("violations", violations);
  return violations == 0 ? kOk : kCheckFailed;
}

RepresentationProblem sticky_problem(const RunConfig& cfg) {
  const auto state = io::sticky_state_from_json(io::read_json_file(cfg.sticky));
  if (cfg.cells < 6) throw Error(ErrorCode::InvalidArgument, "--cells must be at least 6");
  const double t = cfg.time.value_or(1.0);
  const auto y = polar_residual(state, t);
  const auto& x = state.x0().values();
  const auto& w = state.measure().weights();
  // two empty cells on each side keep the atoms off the boundary cells
  const double span = x.back() > x.front() ? x.back() - x.front() : 1.0;
  const double h = span / static_cast<double>(cfg.cells - 4);
  const double lo = x.front() - 2 * h;
  const double hi = lo + h * static_cast<double>(cfg.cells);
  std::vector<Point> atoms, vectors;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Point a(1), f(1);
    a << x[i];
    f << y[i] * w[i];
    atoms.push_back(a);
    vectors.push_back(f);
  }
  Grid grid({lo}, {hi}, {cfg.cells});
  auto h_field = MatrixMeasureField::zero(grid);
  return RepresentationProblem::make(std::move(grid), VectorMeasure(1, atoms, vectors), std::move(h_field),
                                     !cfg.no_identity_row);
}

int cmd_gen_instance(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.sticky.empty()) {
    const auto problem = sticky_problem(cfg);
    write_json(cfg.output, out, io::to_json(problem));
    Diagnostics(err, "gen-instance").kv("source", "sticky").kv("atoms", problem.F.size())
        .kv("cells", problem.grid.cell_count()).kv("trace_budget", problem.trace_budget());
    return kOk;
  }
  require(cfg.input, "--input or --sticky");
  const auto data = io::flow_from_json(io::read_json_file(cfg.input));
  const auto inst = instance_from_flow(data);
  const auto problem = RepresentationProblem::make(data.grid, inst.F, inst.H, !cfg.no_identity_row);
  write_json(cfg.output, out, io::to_json(problem, data.gamma));
  Diagnostics(err, "gen-instance").kv("source", "flow").kv("atoms", inst.F.size())
      .kv("cells", data.grid.cell_count()).kv("trace_budget", problem.trace_budget())
      .kv("h_min_eigenvalue", inst.H.min_eigenvalue());
  return kOk;
}

void add_solver_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--tol", cfg.solver.tol, "Relative representation tolerance")->capture_default_str();
  sub->add_option("--max-iter", cfg.solver.max_iter, "Iteration limit")->capture_default_str();
  sub->add_option("--relax", cfg.solver.relax, "Over-relaxation factor in (0,2)")->capture_default_str();
}

}  // namespace

std::string version_string() { return std::string("polarcone ") + POLARCONE_VERSION + " (interface revision 1)"; }

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
    if (cfg.command == "project") return cmd_project(cfg, out, err);
    if (cfg.command == "certify") return cmd_certify(cfg, out, err);
    if (cfg.command == "recover") return cmd_recover(cfg, out, err);
    if (cfg.command == "verify") return cmd_verify(cfg, out, err);
    if (cfg.command == "gauge") return cmd_gauge(cfg, out, err);
    if (cfg.command == "gen-instance") return cmd_gen_instance(cfg, out, err);
    Diagnostics(err, cfg.command).kv("error", "invalid_argument").kv("message", quoted("unknown command"));
    return kInputError;
  } catch (const Error& e) {
    Diagnostics(err, cfg.command).kv("error", to_string(e.code())).kv("message", quoted(e.what()));
    return kInputError;
  } catch (const std::exception& e) {
    Diagnostics(err, cfg.command).kv("error", "internal").kv("message", quoted(e.what()));
    return kInputError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Monotone-map cones, sticky particles and stress-tensor recovery", "polarcone"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "Read options from a TOML or INI file");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Seed for random test families")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Write a sticky-particle trajectory as CSV");
  simulate->add_option("-i,--input", cfg.input, "StickyState JSON")->required();
  simulate->add_option("-o,--output", cfg.output, "Trajectory CSV ('-' for stdout)");
  simulate->add_option("--t-max", cfg.t_max, "Final time of the uniform time grid")->capture_default_str();
  simulate->add_option("--steps", cfg.steps, "Number of time steps")->capture_default_str();
  simulate->add_option("--times", cfg.times, "Explicit comma-separated instants")->delimiter(',');

  auto* project = app.add_subcommand("project", "Project {\"y\",\"w\"} onto nondecreasing vectors");
  project->add_option("-i,--input", cfg.input, "JSON with y and optional weights w")->required();
  project->add_option("-o,--output", cfg.output, "Projection JSON ('-' for stdout)");

  auto* certify = app.add_subcommand("certify", "Polar-cone certificate of a residual");
  certify->add_option("-i,--input", cfg.input, "StickyState JSON, or {\"Y\",\"X\",\"weights\"}")->required();
  certify->add_option("-t,--time", cfg.time, "Time of the sticky residual (default 0)");
  certify->add_option("-o,--output", cfg.output, "Certificate JSON ('-' for stdout)");

  auto* recover = app.add_subcommand("recover", "Recover a PSD stress field of minimum trace");
  recover->add_option("-i,--input", cfg.input, "Problem JSON")->required();
  recover->add_option("-o,--output", cfg.output, "Result JSON ('-' for stdout)");
  recover->add_option("--csv", cfg.csv, "Also dump M as CSV");
  recover->add_flag("--no-identity-row", cfg.no_identity_row, "Drop the trace equality row");
  add_solver_flags(recover, cfg);

  auto* verify = app.add_subcommand("verify", "Re-check a result file on fresh test deformations");
  verify->add_option("-i,--input", cfg.input, "Problem JSON")->required();
  verify->add_option("-r,--result", cfg.result, "Result JSON")->required();
  verify->add_option("-o,--output", cfg.output, "Report JSON ('-' for stdout)");
  verify->add_flag("--no-identity-row", cfg.no_identity_row, "Do not require trace equality");

  auto* gauge = app.add_subcommand("gauge", "Evaluate the gauge p(v) on random or given v");
  gauge->add_option("-i,--input", cfg.input, "Problem JSON")->required();
  gauge->add_option("-r,--result", cfg.result, "Result JSON; also report <v,M> and dominance");
  gauge->add_option("--v", cfg.v_path, "Field JSON {\"cells\":[...]} or a list of them");
  gauge->add_option("-n,--count", cfg.count, "Number of random v")->capture_default_str();
  gauge->add_flag("--fast", cfg.fast, "Identity-direction bound only");
  gauge->add_option("-o,--output", cfg.output, "JSON lines ('-' for stdout)");

  auto* gen = app.add_subcommand("gen-instance", "Build a problem from flow data or a sticky state");
  gen->add_option("-i,--input", cfg.input, "Flow JSON (f_nodes, h_nodes, e_weights, gamma, rho, grid)");
  gen->add_option("--sticky", cfg.sticky, "StickyState JSON; embeds its polar residual in 1D");
  gen->add_option("-t,--time", cfg.time, "Residual time for --sticky (default 1)");
  gen->add_option("--cells", cfg.cells, "Grid cells for --sticky")->capture_default_str();
  gen->add_flag("--no-identity-row", cfg.no_identity_row, "Mark the problem without the trace row");
  gen->add_option("-o,--output", cfg.output, "Problem JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    // the top-level page lists every subcommand with all of its flags
    out << app.help("", app.get_subcommands().empty() ? CLI::AppFormatMode::All : CLI::AppFormatMode::Normal);
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "command=parse error=invalid_argument message=" << quoted(e.what()) << '\n';
    return kInputError;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return run(cfg, out, err);
}

}  // namespace polarcone::cli
