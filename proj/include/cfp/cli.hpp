#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfp/solvers.hpp"

namespace cfp {

namespace exit_code {
inline constexpr int kFeasible = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kGeneration = 3;
inline constexpr int kMaxIter = 4;
inline constexpr int kParse = 5;
inline constexpr int kNumeric = 6;
}  // namespace exit_code

int status_exit_code(SolveStatus s);

// Columns: k,objective,T_v,max_local_rc,messages_cum (algorithm plus detector
// messages, cumulative).
inline constexpr const char* kTraceHeader = "k,objective,T_v,max_local_rc,messages_cum";
void write_trace_csv(std::ostream& os, const SolveReport& report);

inline constexpr const char* kBenchHeader =
    "instance,algorithm,status,iterations,messages,detector_messages,wall_seconds,gamma,lambda,note";

struct BenchOptions {
  std::filesystem::path instances;
  std::vector<Algorithm> algorithms;  // empty means all
  std::filesystem::path out;
  std::filesystem::path trace_dir;  // empty means <out stem>_traces next to out
  std::size_t max_iter = 10'000;
  double rc_threshold = kDefaultRcThreshold;
  double feas_tol = 1e-6;
  std::vector<double> fb_gammas{0.5, 1.0, 1.5, 1.9};
  std::vector<double> fb_lambdas{0.5, 1.0};
  std::vector<double> dr_gammas{0.5, 1.0, 2.0};
  std::vector<double> dr_lambdas{0.5, 1.0, 1.5, 1.9};
  unsigned jobs = 1;
};

struct BenchRow {
  std::string instance;
  Algorithm algorithm = Algorithm::AFB;
  std::string status;  // feasible | infeasible | maxiter | error
  std::size_t iterations = 0;
  std::size_t messages = 0;
  std::size_t detector_messages = 0;
  double wall_seconds = 0.0;
  double gamma = 1.0;
  double lambda = 1.0;
  std::string note;
};

// Runs every (instance, algorithm) pair; FB and DR keep the best setting of
// their sweep. Rows come back sorted by instance, then algorithm.
std::vector<BenchRow> run_bench(const BenchOptions& options);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

// Entry point of the cfpsplit tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cfp
