#include "cli_app.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tubal/tubal.hpp"

namespace tubal {
namespace cli {
namespace {

constexpr const char* kCsvHeader =
    "method,n,s,n3,m,restarts,inner_steps,relres,seconds";

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LoadedProblem {
  Tensor3d a, b;
  Tensor3d x_star;  // empty for file-backed problems
};

ProblemSpec spec_from_config(const RunConfig& cfg) {
  ProblemSpec p;
  p.kind = problem_kind_from_string(cfg.problem);
  p.n = cfg.n;
  p.s = cfg.s;
  p.n3 = cfg.n3;
  p.seed = cfg.seed;
  return p;
}

LoadedProblem load_problem(const RunConfig& cfg) {
  const bool from_files = !cfg.a_path.empty() || !cfg.b_path.empty();
  const bool from_gen = !cfg.problem.empty();
  if (from_files == from_gen)
    throw Error("exactly one of --problem or --a/--b must be given");
  LoadedProblem lp;
  if (from_files) {
    if (cfg.a_path.empty() || cfg.b_path.empty())
      throw Error("file-backed problems need both --a and --b");
    lp.a = read_tns3(cfg.a_path);
    lp.b = read_tns3(cfg.b_path);
  } else {
    auto gp = generate<double>(spec_from_config(cfg));
    lp.a = std::move(gp.a);
    lp.b = std::move(gp.b);
    lp.x_star = std::move(gp.x_star);
  }
  return lp;
}

std::string csv_row(const std::string& method, Index n, Index s, Index n3,
                    long long m, Index restarts, Index inner, double relres,
                    double seconds) {
  std::ostringstream row;
  row << method << ',' << n << ',' << s << ',' << n3 << ',' << m << ','
      << restarts << ',' << inner << ',' << fmt_g17(relres) << ',';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", seconds);
  row << buf;
  return row.str();
}

void append_csv(const std::string& path, const std::string& row) {
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw IoError("cannot open " + path);
  if (fresh) f << kCsvHeader << "\n";
  f << row << "\n";
  if (!f) throw IoError("short write to " + path);
}

struct SolveOutcome {
  Tensor3d x;
  SolveReport<double> rep;
  long long m_column = 0;  // m for GMRES, kmax for TTGK, 0 for the oracle
};

SolveOutcome run_method(const RunConfig& cfg, const LoadedProblem& lp) {
  SolveOutcome so;
  if (cfg.method == "ttg-gmres") {
    auto r = ttg_gmres<double>(lp.a, lp.b, Tensor3d(), cfg.m, cfg.max_restarts,
                               cfg.tol);
    so.x = std::move(r.x);
    so.rep = std::move(r.report);
    so.m_column = cfg.m;
  } else if (cfg.method == "ttgk") {
    auto r = ttgk_solve<double>(lp.a, lp.b, cfg.kmax, cfg.tol);
    so.x = std::move(r.x);
    so.rep = std::move(r.report);
    so.m_column = cfg.kmax;
  } else if (cfg.method == "oracle") {
    const auto t0 = std::chrono::steady_clock::now();
    so.x = dense_reference_solve(lp.a, lp.b);
    so.rep.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    so.rep.relres =
        frob_norm<double>(lp.b - tprod(lp.a, so.x)) / frob_norm(lp.b);
    so.rep.termination = Termination::converged;
  } else {
    throw Error("unknown method: " + cfg.method);
  }
  return so;
}

nlohmann::json report_json(const RunConfig& cfg, const LoadedProblem& lp,
                           const SolveOutcome& so) {
  nlohmann::json j;
  j["method"] = cfg.method;
  j["n"] = lp.a.n1();
  j["s"] = lp.b.n2();
  j["n3"] = lp.a.n3();
  j["m"] = so.m_column;
  j["tol"] = cfg.tol;
  j["restarts"] = so.rep.restarts;
  j["inner_steps"] = so.rep.iterations;
  j["relres"] = so.rep.relres;
  j["seconds"] = so.rep.elapsed;
  j["termination"] = to_string(so.rep.termination);
  j["stagnated"] = so.rep.stagnated;
  if (so.rep.breakdown_slice >= 0)
    j["breakdown_slice"] = so.rep.breakdown_slice;
  auto hist = nlohmann::json::array();
  for (const auto& h : so.rep.history)
    hist.push_back(
        {{"outer", h.outer}, {"inner", h.inner}, {"relres", h.relres}});
  j["history"] = std::move(hist);
  return j;
}

void write_report(const RunConfig& cfg, const LoadedProblem& lp,
                  const SolveOutcome& so) {
  if (cfg.format == "csv") {
    append_csv(cfg.out + ".csv",
               csv_row(cfg.method, lp.a.n1(), lp.b.n2(), lp.a.n3(),
                       so.m_column, so.rep.restarts, so.rep.iterations,
                       so.rep.relres, so.rep.elapsed));
  } else if (cfg.format == "json") {
    std::ofstream f(cfg.out + ".json");
    if (!f) throw IoError("cannot open " + cfg.out + ".json");
    f << report_json(cfg, lp, so).dump(2) << "\n";
  } else {
    throw Error("unknown format: " + cfg.format);
  }
}

int cmd_gen(const RunConfig& cfg) {
  if (cfg.problem.empty()) throw Error("gen needs --problem");
  if (cfg.out.empty()) throw Error("gen needs --out");
  const ProblemSpec spec = spec_from_config(cfg);
  auto gp = generate<double>(spec);
  write_tns3(cfg.out + "_a.tns3", gp.a);
  write_tns3(cfg.out + "_b.tns3", gp.b);
  write_tns3(cfg.out + "_xstar.tns3", gp.x_star);
  std::ofstream f(cfg.out + ".problem");
  if (!f) throw IoError("cannot open " + cfg.out + ".problem");
  f << to_config(spec);
  std::cout << "wrote " << cfg.out << "_{a,b,xstar}.tns3\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const LoadedProblem lp = load_problem(cfg);
  const SolveOutcome so = run_method(cfg, lp);
  std::cout << "method=" << cfg.method << " n=" << lp.a.n1()
            << " s=" << lp.b.n2() << " n3=" << lp.a.n3()
            << " restarts=" << so.rep.restarts
            << " inner_steps=" << so.rep.iterations
            << " relres=" << fmt_g17(so.rep.relres)
            << " termination=" << to_string(so.rep.termination) << "\n";
  if (!cfg.out.empty()) {
    write_tns3(cfg.out + "_x.tns3", so.x);
    write_report(cfg, lp, so);
  }
  return so.rep.termination == Termination::converged ? 0 : 2;
}

double reported_relres(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    f >> j;
    return j.at("relres").get<double>();
  }
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line, last;
  while (std::getline(f, line))
    if (!line.empty() && line != kCsvHeader) last = line;
  if (last.empty()) throw IoError("no data rows in " + path);
  std::vector<std::string> fields;
  std::istringstream ls(last);
  std::string field;
  while (std::getline(ls, field, ',')) fields.push_back(field);
  if (fields.size() < 9) throw IoError("malformed row in " + path);
  return std::stod(fields[7]);
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.x_path.empty()) throw Error("verify needs --x");
  const LoadedProblem lp = load_problem(cfg);
  const Tensor3d x = read_tns3(cfg.x_path);
  const double relres =
      frob_norm<double>(lp.b - tprod(lp.a, x)) / frob_norm(lp.b);
  std::cout << "relres=" << fmt_g17(relres) << "\n";
  bool ok = true;
  bool checked = false;
  if (!cfg.report_path.empty()) {
    const double reported = reported_relres(cfg.report_path);
    const double diff = std::abs(relres - reported);
    const bool pass =
        diff <= 1e-8 * std::max({std::abs(reported), std::abs(relres), 1e-300});
    std::cout << "reported=" << fmt_g17(reported)
              << " agreement=" << (pass ? "pass" : "FAIL") << "\n";
    ok = ok && pass;
    checked = true;
  }
  if (cfg.oracle_check) {
    const Tensor3d xo = dense_reference_solve(lp.a, lp.b);
    const double dist = frob_norm<double>(x - xo) / frob_norm(xo);
    const bool pass = dist <= cfg.tol;
    std::cout << "oracle_distance=" << fmt_g17(dist)
              << " check=" << (pass ? "pass" : "FAIL") << "\n";
    ok = ok && pass;
    checked = true;
  }
  if (!checked) {
    const bool pass = relres <= cfg.tol;
    std::cout << "tolerance_check=" << (pass ? "pass" : "FAIL") << "\n";
    ok = ok && pass;
  }
  return ok ? 0 : 2;
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.problem.empty()) throw Error("bench needs --problem");
  const auto kind = problem_kind_from_string(cfg.problem);
  std::vector<std::array<long long, 2>> sweep;  // {n, n3}
  if (kind == ProblemSpec::Kind::example1) {
    for (long long n : {50, 100, 200}) sweep.push_back({n, cfg.n3});
  } else if (kind == ProblemSpec::Kind::poisson3d) {
    // shrink all three dims together, keeping the n3 = m0^2 coupling
    for (long long n : {9, 16, 25}) sweep.push_back({n, n});
  } else {
    throw Error("bench needs a generator problem");
  }
  std::cout << kCsvHeader << "\n";
  bool all_converged = true;
  for (const auto& size : sweep) {
    RunConfig point = cfg;
    point.n = size[0];
    point.n3 = size[1];
    const LoadedProblem lp = load_problem(point);
    const SolveOutcome so = run_method(point, lp);
    const std::string row =
        csv_row(cfg.method, lp.a.n1(), lp.b.n2(), lp.a.n3(), so.m_column,
                so.rep.restarts, so.rep.iterations, so.rep.relres,
                so.rep.elapsed);
    std::cout << row << "\n";
    if (!cfg.out.empty()) append_csv(cfg.out + ".csv", row);
    all_converged =
        all_converged && so.rep.termination == Termination::converged;
  }
  return all_converged ? 0 : 2;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    set_num_threads(cfg.threads);
    if (cfg.command == "gen") return cmd_gen(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "bench") return cmd_bench(cfg);
    throw Error("unknown command: " + cfg.command);
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SymmetryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"t-product tensor solver toolkit"};
  app.require_subcommand(1);

  auto add_problem_opts = [&cfg](CLI::App* c) {
    c->add_option("--problem", cfg.problem, "generator: example1 or poisson3d");
    c->add_option("--n", cfg.n, "slice size (m0^2 for poisson3d)");
    c->add_option("--s", cfg.s, "lateral width of the right-hand side");
    c->add_option("--n3", cfg.n3, "third dimension");
    c->add_option("--seed", cfg.seed, "random seed");
  };
  auto add_file_opts = [&cfg](CLI::App* c) {
    c->add_option("--a", cfg.a_path, "operator tensor (TNS3)");
    c->add_option("--b", cfg.b_path, "right-hand side tensor (TNS3)");
  };
  auto add_solver_opts = [&cfg](CLI::App* c) {
    c->add_option("--method", cfg.method, "ttg-gmres, ttgk, or oracle");
    c->add_option("--m", cfg.m, "restart parameter");
    c->add_option("--tol", cfg.tol, "convergence tolerance");
    c->add_option("--max-restarts", cfg.max_restarts, "GMRES cycle limit");
    c->add_option("--kmax", cfg.kmax, "bidiagonalization step limit");
    c->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };
  auto add_out_opts = [&cfg](CLI::App* c) {
    c->add_option("--out", cfg.out, "output path prefix");
    c->add_option("--format", cfg.format, "report format: csv or json");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a benchmark problem");
  add_problem_opts(gen);
  add_out_opts(gen);

  CLI::App* solve = app.add_subcommand("solve", "solve a tensor system");
  add_problem_opts(solve);
  add_file_opts(solve);
  add_solver_opts(solve);
  add_out_opts(solve);

  CLI::App* verify = app.add_subcommand("verify", "check a solution");
  add_problem_opts(verify);
  add_file_opts(verify);
  verify->add_option("--x", cfg.x_path, "solution tensor (TNS3)");
  verify->add_option("--report", cfg.report_path, "report to cross-check");
  verify->add_flag("--oracle", cfg.oracle_check,
                   "compare against the dense oracle");
  verify->add_option("--tol", cfg.tol, "acceptance tolerance");
  verify->add_option("--threads", cfg.threads, "worker threads");

  CLI::App* bench = app.add_subcommand("bench", "sweep problem sizes");
  bench->add_option("--problem", cfg.problem, "example1 or poisson3d");
  bench->add_option("--s", cfg.s, "lateral width");
  bench->add_option("--n3", cfg.n3, "third dimension (example1 sweep)");
  bench->add_option("--seed", cfg.seed, "random seed");
  add_solver_opts(bench);
  add_out_opts(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  if (gen->parsed()) cfg.command = "gen";
  if (solve->parsed()) cfg.command = "solve";
  if (verify->parsed()) cfg.command = "verify";
  if (bench->parsed()) cfg.command = "bench";
  return run(cfg);
}

}  // namespace cli
}  // namespace tubal
