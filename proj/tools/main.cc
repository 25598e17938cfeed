#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

int main(int argc, char** argv) {
  using namespace kamforge::cli;
  CLI::App app{"kamforge: frequency-preserving KAM iterations for twist maps and rotations"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", run_opts.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", run_opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--max-steps", run_opts.max_steps, "override max_steps");
    cmd->add_option("--tol", run_opts.tol, "override tolerances.tol");
  };
  CLI::App* run = app.add_subcommand("run", "run the engine for one configuration");
  add_run_flags(run);
  run->add_option("--sweep", run_opts.sweep, "sweep spec, e.g. eps=1e-5..1e-3:geometric:5");
  CLI::App* sweep = app.add_subcommand("sweep", "run an epsilon sweep in parallel");
  add_run_flags(sweep);
  sweep->add_option("--sweep", run_opts.sweep, "sweep spec, e.g. eps=1e-5..1e-3:geometric:5")
      ->required();

  CLI::App* verify = app.add_subcommand("verify", "check a single property");
  verify->require_subcommand(1);

  DiophantineOptions dio;
  CLI::App* vd = verify->add_subcommand("diophantine", "Diophantine check of a frequency");
  vd->add_option("--omega", dio.omega, "components: numbers, golden or silver")
      ->required()
      ->delimiter(',');
  vd->add_option("--tau", dio.tau)->capture_default_str();
  vd->add_option("--gamma", dio.gamma)->capture_default_str();
  vd->add_option("--kmax", dio.k_max)->capture_default_str();
  vd->add_option("--period", dio.period, "two_pi or one")->capture_default_str();

  DegreeOptions deg;
  CLI::App* vg = verify->add_subcommand("degree", "degree of omega - p on the model region");
  vg->add_option("--map", deg.map, "catalog name")->required();
  vg->add_option("--p", deg.p, "target frequency")->delimiter(',');

  RotationOptions rot;
  CLI::App* vr = verify->add_subcommand("rotation", "orbit-averaged rotation number");
  vr->add_option("--map", rot.map, "catalog twist model")->required();
  vr->add_option("--eps", rot.epsilon, "perturbation size");
  vr->add_option("--r", rot.r, "initial action")->required();
  vr->add_option("--theta", rot.theta, "initial angle")->capture_default_str();
  vr->add_option("--iters", rot.iters)->capture_default_str();
  vr->add_option("--expect", rot.expect, "expected rotation number");
  vr->add_option("--tol", rot.tol, "allowed difference from --expect")->capture_default_str();

  ResidualOptions res;
  CLI::App* vs = verify->add_subcommand("residual", "recompute the conjugacy residual of a run");
  vs->add_option("--result", res.result_path, "result.json written by run")
      ->required()
      ->check(CLI::ExistingFile);
  vs->add_option("--max", res.max_residual, "largest acceptable residual")
      ->capture_default_str();

  CLI::App* catalog = app.add_subcommand("catalog", "list the built-in models");
  catalog->add_subcommand("list", "list the built-in models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (run->parsed()) {
    return run_opts.sweep ? SweepCommand(run_opts, std::cout, std::cerr)
                          : RunCommand(run_opts, std::cout, std::cerr);
  }
  if (sweep->parsed()) return SweepCommand(run_opts, std::cout, std::cerr);
  if (vd->parsed()) return VerifyDiophantine(dio, std::cout, std::cerr);
  if (vg->parsed()) return VerifyDegree(deg, std::cout, std::cerr);
  if (vr->parsed()) return VerifyRotation(rot, std::cout, std::cerr);
  if (vs->parsed()) return VerifyResidual(res, std::cout, std::cerr);
  if (catalog->parsed()) return CatalogList(std::cout);
  return kExitError;
}
