#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfp/cli.hpp"
#include "cfp/error.hpp"
#include "cfp/instance_io.hpp"
#include "doctest.h"

using namespace cfp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cfpsplit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cfpsplit_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

// u = 0 -> m = 1 -> o = 2 with o able to pass on what it receives.
std::string path_json(double n_m) {
  return R"({"nodes": 3, "edges": [{"from": 0, "to": 1, "capacity": 10}, {"from": 1, "to": 2, "capacity": 10}],
"nodal_capacities": [10, )" + format_double(n_m) + R"(, 10], "source": 0, "sink": 2, "injection": 5})";
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(100.0) == "100");
  CHECK(format_double(12.5) == "12.5");
  CHECK(format_double(1e-7) == "1e-07");
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
}

TEST_CASE("instance files round-trip") {
  InstanceFile f;
  f.instance = parse_instance(path_json(2.5)).instance;
  f.metadata.seed = 7;
  f.metadata.density = 0.2;
  f.metadata.calibration = "feasible";
  f.metadata.trace = {{100, 10, false, 2.5}, {50, 10, true, 50}};
  const std::string text = format_instance(f);
  CHECK(parse_instance(text) == f);
  CHECK(format_instance(parse_instance(text)) == text);

  InstanceFile bare;
  bare.instance = f.instance;
  CHECK(format_instance(bare).find("metadata") == std::string::npos);
}

TEST_CASE("malformed instance files") {
  const auto code_of = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NumericFailure;
  };
  CHECK(code_of("{") == ErrorCode::ParseError);
  CHECK(code_of(R"({"nodes": 3})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"nodes": 3, "edges": [], "nodal_capacities": [1, 1], "source": 0, "sink": 2, "injection": 1})") ==
        ErrorCode::InvalidInstance);
  std::string self_loop = path_json(10);
  self_loop.replace(self_loop.find(R"("to": 1)"), 7, R"("to": 0)");
  CHECK(code_of(self_loop) == ErrorCode::InvalidInstance);
}

TEST_CASE("gen is deterministic and writes a calibrated instance") {
  TempDir dir("gen");
  REQUIRE(cli({"gen", "--nodes", "12", "--seed", "5", "--density", "0.3", "--out", dir / "a.json"}).code == 0);
  REQUIRE(cli({"gen", "--nodes", "12", "--seed", "5", "--density", "0.3", "--out", dir / "b.json"}).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const InstanceFile f = read_instance(dir / "a.json");
  CHECK(f.metadata.seed == 5u);
  CHECK(f.metadata.calibration == "feasible");
  CHECK(maxflow_feasible(f.instance).feasible);

  REQUIRE(cli({"gen", "--nodes", "12", "--seed", "5", "--density", "0.3", "--infeasible", "--out", dir / "c.json"})
              .code == 0);
  const InstanceFile g = read_instance(dir / "c.json");
  CHECK(g.metadata.calibration == "relay-infeasible");
  CHECK_FALSE(maxflow_feasible(g.instance).feasible);

  const Run stdout_run = cli({"gen", "--nodes", "12", "--seed", "5", "--density", "0.3"});
  CHECK(stdout_run.out == slurp(dir / "a.json"));
}

TEST_CASE("gen failures") {
  CHECK(cli({"gen", "--nodes", "3"}).code == exit_code::kGeneration);
  CHECK(cli({"gen"}).code == exit_code::kUsage);
  CHECK(cli({"gen", "--nodes", "8", "--feasible", "--infeasible"}).code == exit_code::kUsage);
  CHECK(cli({}).code == exit_code::kUsage);
  CHECK(cli({"frobnicate"}).code == exit_code::kUsage);
}

TEST_CASE("oracle subcommand") {
  TempDir dir("oracle");
  write(dir / "ok.json", path_json(10));
  write(dir / "tight.json", path_json(2));
  const Run ok = cli({"oracle", "--in", dir / "ok.json"});
  CHECK(ok.code == 0);
  CHECK(ok.out == "feasible 10\n");
  const Run tight = cli({"oracle", "--in", dir / "tight.json"});
  CHECK(tight.code == exit_code::kInfeasible);
  CHECK(tight.out == "infeasible 2\n");
}

TEST_CASE("solve subcommand") {
  TempDir dir("solve");
  write(dir / "ok.json", path_json(10));
  const Run ok = cli({"solve", "--in", dir / "ok.json", "--alg", "afb", "--trace", dir / "t.csv"});
  CHECK(ok.code == exit_code::kFeasible);
  CHECK(ok.out.rfind("status feasible iterations ", 0) == 0);
  const std::string trace = slurp(dir / "t.csv");
  CHECK(trace.rfind(std::string(kTraceHeader) + "\n1,", 0) == 0);

  const Run dist = cli({"solve", "--in", dir / "ok.json", "--alg", "afb", "--distributed"});
  CHECK(dist.out == ok.out);

  // The relay node cannot carry the injection but every node set is nonempty.
  write(dir / "tight.json", path_json(2));
  for (const char* alg : {"fb", "afb", "dr", "alm", "falm", "vn", "dykstra", "mpa"}) {
    CAPTURE(alg);
    CHECK(cli({"solve", "--in", dir / "tight.json", "--alg", alg}).code == exit_code::kInfeasible);
  }
  CHECK(cli({"solve", "--in", dir / "ok.json", "--alg", "afb", "--max-iter", "1"}).code == exit_code::kMaxIter);

  CHECK(cli({"solve", "--in", dir / "missing.json"}).code == exit_code::kParse);
  write(dir / "bad.json", "{\"nodes\": ");
  CHECK(cli({"solve", "--in", dir / "bad.json"}).code == exit_code::kParse);
  CHECK(cli({"solve", "--in", dir / "ok.json", "--alg", "simplex"}).code == exit_code::kUsage);
  CHECK(cli({"solve", "--in", dir / "ok.json", "--alg", "fb", "--gamma", "-1"}).code == exit_code::kUsage);
}

TEST_CASE("bench subcommand") {
  TempDir dir("bench");
  fs::create_directories(dir.path / "inst");
  write(dir / "inst/a.json", path_json(10));
  write(dir / "inst/b.json", path_json(2));
  const Run run = cli({"bench", "--instances", dir / "inst", "--algs", "afb,fb,vn", "--out", dir / "bench.csv",
                       "--traces", dir / "traces", "--jobs", "2", "--fb-gamma", "1", "--fb-lambda", "1"});
  REQUIRE(run.code == 0);
  std::istringstream csv(slurp(dir / "bench.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == kBenchHeader);
  CHECK(lines[1].rfind("a.json,fb,feasible,", 0) == 0);
  CHECK(lines[2].rfind("a.json,afb,feasible,", 0) == 0);
  CHECK(lines[3].rfind("a.json,vn,feasible,", 0) == 0);
  CHECK(lines[4].rfind("b.json,fb,infeasible,", 0) == 0);
  CHECK(fs::exists(dir.path / "traces" / "a_afb.csv"));
  CHECK(slurp(dir / "traces/b_vn.csv").rfind(kTraceHeader, 0) == 0);
}

TEST_CASE("plain infeasible calibration yields instances solve rejects") {
  TempDir dir("plain");
  REQUIRE(cli({"gen", "--nodes", "12", "--seed", "5", "--density", "0.3", "--infeasible", "--calibration", "plain",
               "--out", dir / "p.json"})
              .code == 0);
  const InstanceFile f = read_instance(dir / "p.json");
  CHECK(f.metadata.calibration == "infeasible");
  CHECK_FALSE(maxflow_feasible(f.instance).feasible);
  if (!empty_node_sets(f.instance).empty()) {
    CHECK(cli({"solve", "--in", dir / "p.json"}).code == exit_code::kParse);
  }
}
