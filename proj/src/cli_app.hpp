#pragma once

#include <cstdint>
#include <string>

namespace tubal {
namespace cli {

// One parsed invocation; filled by run_cli or built directly in tests.
struct RunConfig {
  std::string command;  // gen | solve | verify | bench
  std::string method = "ttg-gmres";
  std::string problem;             // example1 | poisson3d
  std::string a_path, b_path;      // file-backed problem source
  std::string x_path;              // verify: solution to check
  std::string report_path;         // verify: report to cross-check
  long long n = 0;
  long long s = 1;
  long long n3 = 1;
  long long m = 10;
  long long max_restarts = 100;
  long long kmax = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all cores
  std::string out;
  std::string format = "csv";  // csv | json
  bool oracle_check = false;   // verify: compare against the dense oracle
};

// Executes one command; never throws.  Exit codes: 0 success, 2 solver did
// not converge or a verify check failed (reports still written), 3 invalid
// config or input, 4 internal consistency failure.
int run(const RunConfig& cfg);

// Flag-parsing front end for main().
int run_cli(int argc, const char* const* argv);

}  // namespace cli
}  // namespace tubal
