#include "cfp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cfp/error.hpp"
#include "cfp/flowprob.hpp"
#include "cfp/graphgen.hpp"
#include "cfp/instance_io.hpp"
#include "cfp/netsim.hpp"

namespace cfp {

namespace fs = std::filesystem;

int status_exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return exit_code::kFeasible;
    case SolveStatus::Infeasible: return exit_code::kInfeasible;
    case SolveStatus::MaxIter: return exit_code::kMaxIter;
  }
  return exit_code::kNumeric;
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
  os << kTraceHeader << '\n';
  std::size_t cum = 0;
  for (const IterationTrace& t : report.trace) {
    cum += t.messages + t.detector_messages;
    os << t.k << ',' << format_double(t.objective) << ',' << format_double(t.T_v) << ','
       << format_double(t.max_rc) << ',' << cum << '\n';
  }
}

namespace {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "maxiter";
  }
  return "error";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Better of two finished runs: a verdict beats MaxIter, then fewer iterations.
bool better(const SolveReport& a, const SolveReport& b) {
  const bool da = a.status != SolveStatus::MaxIter;
  const bool db = b.status != SolveStatus::MaxIter;
  if (da != db) return da;
  return a.iterations < b.iterations;
}

struct BenchJob {
  fs::path file;
  Algorithm algorithm;
};

BenchRow run_one(const BenchJob& job, const BenchOptions& opt, const fs::path& trace_dir) {
  BenchRow row;
  row.instance = job.file.filename().string();
  row.algorithm = job.algorithm;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const InstanceFile file = read_instance(job.file.string());
    const FlowCfp cfp = build_cfp(file.instance);
    SolverConfig base;
    base.algorithm = job.algorithm;
    base.max_iter = opt.max_iter;
    base.rc_threshold = opt.rc_threshold;
    base.feas_tol = opt.feas_tol;

    std::vector<std::pair<double, double>> settings{{1.0, 1.0}};
    if (job.algorithm == Algorithm::FB || job.algorithm == Algorithm::DR) {
      const bool fb = job.algorithm == Algorithm::FB;
      settings.clear();
      for (double g : fb ? opt.fb_gammas : opt.dr_gammas) {
        for (double l : fb ? opt.fb_lambdas : opt.dr_lambdas) settings.emplace_back(g, l);
      }
    }
    std::optional<SolveReport> best;
    for (const auto& [g, l] : settings) {
      SolverConfig cfg = base;
      cfg.gamma = {g};
      cfg.lambda = {l};
      SolveReport r = solve(cfp.problem, cfg);
      if (!best || better(r, *best)) {
        best = std::move(r);
        row.gamma = g;
        row.lambda = l;
      }
    }
    row.status = status_name(best->status);
    row.iterations = best->iterations;
    row.messages = best->total_messages;
    row.detector_messages = best->total_detector_messages;
    if (settings.size() > 1) row.note = "best of " + std::to_string(settings.size()) + " settings";

    const fs::path trace = trace_dir / (job.file.stem().string() + "_" + std::string(to_string(job.algorithm)) + ".csv");
    std::ofstream os(trace);
    write_trace_csv(os, *best);
  } catch (const std::exception& e) {
    row.status = "error";
    row.note = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.instances)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Algorithm> algs = opt.algorithms;
  if (algs.empty()) algs.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));

  fs::path trace_dir = opt.trace_dir;
  if (trace_dir.empty()) trace_dir = opt.out.parent_path() / (opt.out.stem().string() + "_traces");
  fs::create_directories(trace_dir);

  std::vector<BenchJob> jobs;
  for (const fs::path& f : files) {
    for (Algorithm a : algs) jobs.push_back({f, a});
  }
  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = run_one(jobs[i], opt, trace_dir);
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.instance != b.instance) return a.instance < b.instance;
    return static_cast<int>(a.algorithm) < static_cast<int>(b.algorithm);
  });
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    os << csv_field(r.instance) << ',' << to_string(r.algorithm) << ',' << r.status << ',' << r.iterations << ','
       << r.messages << ',' << r.detector_messages << ',' << format_double(r.wall_seconds) << ','
       << format_double(r.gamma) << ',' << format_double(r.lambda) << ',' << csv_field(r.note) << '\n';
  }
}

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CFP_SPLIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

int cmd_gen(std::size_t nodes, std::uint64_t seed, double density, bool infeasible, const std::string& calibration,
            const std::string& out_path, std::ostream& out, std::ostream& err) {
  try {
    GraphGenOptions go;
    go.edge_probability = density;
    const SignedAdjacency a = generate_graph(nodes, seed, go);
    const auto [u, o] = pick_source_sink(a);
    InstanceFile file;
    Calibration cal;
    if (!infeasible) {
      cal = calibrate_feasible(a, u, o);
      file.metadata.calibration = "feasible";
    } else if (calibration == "plain") {
      cal = calibrate_infeasible(a, u, o);
      file.metadata.calibration = "infeasible";
    } else {
      cal = calibrate_relay_infeasible(a, u, o);
      file.metadata.calibration = "relay-infeasible";
    }
    file.instance = std::move(cal.instance);
    file.metadata.seed = seed;
    file.metadata.density = density;
    file.metadata.trace = std::move(cal.trace);
    if (out_path.empty() || out_path == "-") {
      out << format_instance(file);
    } else {
      write_instance(out_path, file);
    }
    return exit_code::kFeasible;
  } catch (const std::exception& e) {
    err << "gen: " << e.what() << '\n';
    return exit_code::kGeneration;
  }
}

struct SolveArgs {
  std::string in;
  std::string alg = "afb";
  std::size_t max_iter = 10'000;
  double rc_threshold = kDefaultRcThreshold;
  double feas_tol = 1e-6;
  std::vector<double> gamma{1.0};
  std::vector<double> lambda{1.0};
  std::string trace;
  bool distributed = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const auto alg = parse_algorithm(a.alg);
  if (!alg) {
    err << "solve: unknown algorithm '" << a.alg << "'\n";
    return exit_code::kUsage;
  }
  FlowCfp cfp;
  try {
    cfp = build_cfp(read_instance(a.in).instance);
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << '\n';
    return exit_code::kParse;
  }
  SolverConfig cfg;
  cfg.algorithm = *alg;
  cfg.max_iter = a.max_iter;
  cfg.rc_threshold = a.rc_threshold;
  cfg.feas_tol = a.feas_tol;
  cfg.gamma = a.gamma;
  cfg.lambda = a.lambda;
  SolveReport report;
  try {
    report = a.distributed ? run_distributed(cfp.problem, cfg, {}, false).report : solve(cfp.problem, cfg);
  } catch (const Error& e) {
    err << "solve: " << e.what() << '\n';
    const bool bad_config = e.code() == ErrorCode::InvalidSchedule || e.code() == ErrorCode::InvalidWeights ||
                            e.code() == ErrorCode::NonpositiveScale || e.code() == ErrorCode::OutOfRange;
    return bad_config ? exit_code::kUsage : exit_code::kNumeric;
  }
  if (!a.trace.empty()) {
    std::ofstream os(a.trace);
    write_trace_csv(os, report);
  }
  out << "status " << status_name(report.status) << " iterations " << report.iterations << " objective "
      << format_double(report.trace.empty() ? 0.0 : report.trace.back().objective) << " messages "
      << report.total_messages + report.total_detector_messages << '\n';
  return status_exit_code(report.status);
}

int cmd_oracle(const std::string& in, std::ostream& out, std::ostream& err) {
  InstanceFile file;
  try {
    file = read_instance(in);
  } catch (const std::exception& e) {
    err << "oracle: " << e.what() << '\n';
    return exit_code::kParse;
  }
  const MaxFlowVerdict v = maxflow_feasible(file.instance);
  out << (v.feasible ? "feasible " : "infeasible ") << format_double(v.throughput) << '\n';
  return v.feasible ? exit_code::kFeasible : exit_code::kInfeasible;
}

int cmd_bench(BenchOptions opt, const std::vector<std::string>& algs, std::ostream& out, std::ostream& err) {
  for (const std::string& name : algs) {
    const auto a = parse_algorithm(name);
    if (!a) {
      err << "bench: unknown algorithm '" << name << "'\n";
      return exit_code::kUsage;
    }
    opt.algorithms.push_back(*a);
  }
  std::vector<BenchRow> rows;
  try {
    rows = run_bench(opt);
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << '\n';
    return exit_code::kParse;
  }
  if (opt.out.empty()) {
    write_bench_csv(out, rows);
  } else {
    std::ofstream os(opt.out);
    write_bench_csv(os, rows);
  }
  return exit_code::kFeasible;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed convex feasibility solvers for flow problems"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a calibrated flow instance");
  std::size_t nodes = 0;
  std::uint64_t seed = default_seed();
  double density = 0.5;
  bool feasible_flag = false;
  bool infeasible_flag = false;
  std::string calibration = "relay";
  std::string gen_out;
  gen->add_option("--nodes", nodes, "number of nodes")->required();
  gen->add_option("--seed", seed, "random seed (default: $CFP_SPLIT_SEED or 1)");
  gen->add_option("--density", density, "probability of an edge in each random draw")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");
  auto* f_opt = gen->add_flag("--feasible", feasible_flag, "calibrate to a feasible instance (default)");
  gen->add_flag("--infeasible", infeasible_flag, "calibrate to an infeasible instance")->excludes(f_opt);
  gen->add_option("--calibration", calibration, "infeasible calibration: relay or plain")
      ->check(CLI::IsMember({"relay", "plain"}));

  auto* solve_cmd = app.add_subcommand("solve", "run one solver on an instance");
  SolveArgs sa;
  solve_cmd->add_option("--in", sa.in, "instance file")->required();
  solve_cmd->add_option("--alg", sa.alg, "fb|afb|dr|alm|falm|vn|dykstra|mpa");
  solve_cmd->add_option("--max-iter", sa.max_iter);
  solve_cmd->add_option("--rc-threshold", sa.rc_threshold);
  solve_cmd->add_option("--feas-tol", sa.feas_tol);
  solve_cmd->add_option("--gamma", sa.gamma, "step schedule (last value repeats)")->delimiter(',');
  solve_cmd->add_option("--lambda", sa.lambda, "relaxation schedule (last value repeats)")->delimiter(',');
  solve_cmd->add_option("--trace", sa.trace, "write the per-iteration trace CSV here");
  solve_cmd->add_flag("--distributed", sa.distributed, "route every exchange through the message simulator");

  auto* bench = app.add_subcommand("bench", "run solvers over a directory of instances");
  BenchOptions bo;
  std::vector<std::string> bench_algs;
  std::string bench_instances;
  std::string bench_out;
  std::string bench_traces;
  bench->add_option("--instances", bench_instances, "directory of *.json instances")->required();
  bench->add_option("--algs", bench_algs, "comma separated algorithms (default: all)")->delimiter(',');
  bench->add_option("--out", bench_out, "summary CSV (stdout when omitted)");
  bench->add_option("--traces", bench_traces, "directory for per-run trace CSVs");
  bench->add_option("--max-iter", bo.max_iter);
  bench->add_option("--rc-threshold", bo.rc_threshold);
  bench->add_option("--fb-gamma", bo.fb_gammas, "FB gamma sweep")->delimiter(',');
  bench->add_option("--fb-lambda", bo.fb_lambdas, "FB lambda sweep")->delimiter(',');
  bench->add_option("--dr-gamma", bo.dr_gammas, "DR gamma sweep")->delimiter(',');
  bench->add_option("--dr-lambda", bo.dr_lambdas, "DR lambda sweep")->delimiter(',');
  bench->add_option("--jobs", bo.jobs, "parallel workers");

  auto* oracle = app.add_subcommand("oracle", "exact max-flow feasibility verdict");
  std::string oracle_in;
  oracle->add_option("--in", oracle_in, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_code::kUsage;
  }

  if (gen->parsed()) return cmd_gen(nodes, seed, density, infeasible_flag, calibration, gen_out, out, err);
  if (solve_cmd->parsed()) return cmd_solve(sa, out, err);
  if (oracle->parsed()) return cmd_oracle(oracle_in, out, err);
  bo.instances = bench_instances;
  bo.out = bench_out;
  bo.trace_dir = bench_traces;
  if (bo.out.empty() && bo.trace_dir.empty()) bo.trace_dir = fs::path(bench_instances) / "traces";
  return cmd_bench(bo, bench_algs, out, err);
}

}  // namespace cfp
