#ifndef KAMFORGE_TOOLS_COMMANDS_H_
#define KAMFORGE_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.h"

namespace kamforge::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
// Run stopped without converging, or a verified property does not hold.
inline constexpr int kExitNotMet = 2;

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> max_steps;
  std::optional<double> tol;
  std::optional<std::string> sweep;
};

// Summary of one engine run, also used as a sweep row.
struct RunSummary {
  std::string status;  // converged, max_steps, diverged or error
  double epsilon = 0.0;
  int steps = 0;
  double conjugacy_residual = 0.0;
  double frequency_residual = 0.0;
  double translation = 0.0;  // |r_tilde| or |xi_inf - xi_star|
  std::string diagnostic;
};

// Runs the configured engine and writes steps.csv, ledger.csv, report.csv,
// report.json and result.json into out_dir.
RunSummary ExecuteRun(const RunConfig& config, const std::string& out_dir);

int RunCommand(const RunOptions& opts, std::ostream& out, std::ostream& err);
int SweepCommand(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct DiophantineOptions {
  std::vector<std::string> omega;  // numbers or golden / silver
  double tau = 1.5;
  double gamma = 1.0;
  int k_max = 50;
  std::string period = "two_pi";
};
int VerifyDiophantine(const DiophantineOptions& o, std::ostream& out, std::ostream& err);

struct DegreeOptions {
  std::string map;
  std::vector<double> p;
};
int VerifyDegree(const DegreeOptions& o, std::ostream& out, std::ostream& err);

struct RotationOptions {
  std::string map;
  std::optional<double> epsilon;
  double r = 0.0;
  double theta = 0.0;
  long iters = 1000000;
  std::optional<double> expect;
  double tol = 1e-9;
};
int VerifyRotation(const RotationOptions& o, std::ostream& out, std::ostream& err);

struct ResidualOptions {
  std::string result_path;
  double max_residual = 1e-10;
};
int VerifyResidual(const ResidualOptions& o, std::ostream& out, std::ostream& err);

int CatalogList(std::ostream& out);

// Worker count for sweeps: KAMFORGE_THREADS if set, else the hardware count.
int SweepThreads();

}  // namespace kamforge::cli

#endif  // KAMFORGE_TOOLS_COMMANDS_H_
