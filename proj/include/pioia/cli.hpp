// Command-line front end: solve, perturb, oracle.

#ifndef PIOIA_CLI_HPP_
#define PIOIA_CLI_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pioia/progressive.hpp"

namespace pioia {

struct SolveArgs {
  std::string instance;
  std::string variant = "f2";
  std::string method = "m4";
  AlgoParams params;
  std::string backend;  // empty: PIOIA_BACKEND or ipm
  std::uint64_t seed = 0;
  std::string trace_path;
  std::string summary_path;
  std::optional<double> obj_star;
};

struct PerturbArgs {
  std::string instance;
  double sigma = 0.05;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = ".";
  bool scale_q = true;
};

struct OracleArgs {
  std::string instance;
  std::string variant = "f2";
  std::string backend;
  std::string golden_path;
  bool cross_check = false;  // reprice the best schedule with the other backend
};

// 0 converged, 2 stopped early with an incumbent, 1 error.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_perturb(const PerturbArgs& args, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err);

// Summary document for a finished run; infinities become null.
nlohmann::json run_summary(const SolverState& state, const UcInstance& inst, FormulationVariant variant,
                           Method method, const AlgoParams& params, std::optional<double> obj_star);

// "3", "1..10" or "1,4,9". Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// argv[0] is the program name. Parses subcommands and dispatches.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace pioia

#endif  // PIOIA_CLI_HPP_
