#include "commands.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kamforge/diagnostics.h"
#include "kamforge/errors.h"
#include "kamforge/frequency_solver.h"
#include "kamforge/kam_param.h"
#include "kamforge/kam_twist.h"
#include "kamforge/serialize.h"
#include "kamforge/small_divisors.h"
#include "kamforge/testbed.h"

namespace kamforge::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw KamError(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  f << text;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KamError(ErrorKind::kInvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ConfigBlock(const RunConfig& c) {
  Json j;
  j["model"] = c.model;
  j["seed"] = c.overrides.seed;
  if (c.overrides.epsilon) j["epsilon"] = *c.overrides.epsilon;
  if (c.overrides.target) j["target"] = *c.overrides.target;
  j["tol"] = c.engine.tol;
  j["freq_tol"] = c.engine.freq_tol;
  j["max_steps"] = c.engine.max_steps;
  j["ablate_translation"] = c.engine.ablate_translation;
  j["solver_mode"] = c.engine.range_mode ? "range" : "standard";
  return j;
}

// Adds the config block to a result record.
std::string WithConfig(const std::string& record, const RunConfig& c) {
  Json j = Json::parse(record);
  j["config"] = ConfigBlock(c);
  return j.dump(2) + "\n";
}

std::string ReportJson(ConvergenceReport report, const std::string& diagnostic) {
  Json j = Json::parse(report.ToJson());
  j["diagnostic"] = diagnostic;
  return j.dump(2) + "\n";
}

double SupDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

int StepsOf(const std::vector<StepMetrics>& m) { return m.empty() ? 0 : m.back().nu; }

double ParseOmegaToken(const std::string& t, AnglePeriod period) {
  const double scale = period == AnglePeriod::kOne ? 1.0 / (2.0 * std::numbers::pi) : 1.0;
  if (t == "golden") return GoldenFrequency() * scale;
  if (t == "silver") return SilverFrequency() * scale;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) {
    throw KamError(ErrorKind::kInvalidArgument,
                   "--omega entries must be numbers, golden or silver (got '" + t + "')");
  }
  return v;
}

}  // namespace

RunSummary ExecuteRun(const RunConfig& config, const std::string& out_dir) {
  const MapCatalogEntry& entry = FindCatalogEntry(config.model);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  RunSummary s;
  if (entry.kind == ModelKind::kTwist) {
    const TwistMapModel model = entry.twist(config.overrides);
    const TwistResult r = TwistKamRun(model, config.engine);
    ConvergenceReport report = HypothesisReport(r.schedule, r.metrics, EngineKind::kTwist,
                                                model.freq.modulus_upper);
    report.status = RunStatusName(r.status);
    report.conjugacy_residual = r.conjugacy_residual;
    report.frequency_residual = r.frequency_residual;
    WriteFile(dir / "steps.csv", TwistMetricsCsv(r.metrics));
    WriteFile(dir / "ledger.csv", r.chain.translations().ToCsv());
    WriteFile(dir / "report.csv", report.ToCsv());
    WriteFile(dir / "report.json", ReportJson(report, r.diagnostic));
    WriteFile(dir / "result.json", WithConfig(TwistResultToJson(r, model), config));
    s.status = RunStatusName(r.status);
    s.epsilon = model.epsilon;
    s.steps = StepsOf(r.metrics);
    s.conjugacy_residual = r.conjugacy_residual;
    s.frequency_residual = r.frequency_residual;
    s.translation = SupDiff(r.r_hat_inf, model.r_star);
    s.diagnostic = r.diagnostic;
  } else if (entry.kind == ModelKind::kParam) {
    const ParamMapModel model = entry.param(config.overrides);
    const ParamResult r = ParamKamRun(model, config.engine);
    ConvergenceReport report = HypothesisReport(r.schedule, r.metrics, EngineKind::kParam,
                                                model.freq.modulus_upper);
    report.status = RunStatusName(r.status);
    report.conjugacy_residual = r.conjugacy_residual;
    report.frequency_residual = r.frequency_residual;
    WriteFile(dir / "steps.csv", ParamMetricsCsv(r.metrics));
    WriteFile(dir / "ledger.csv", r.chain.translations().ToCsv());
    WriteFile(dir / "report.csv", report.ToCsv());
    WriteFile(dir / "report.json", ReportJson(report, r.diagnostic));
    WriteFile(dir / "result.json", WithConfig(ParamResultToJson(r, model), config));
    s.status = RunStatusName(r.status);
    s.epsilon = model.epsilon;
    s.steps = StepsOf(r.metrics);
    s.conjugacy_residual = r.conjugacy_residual;
    s.frequency_residual = r.frequency_residual;
    s.translation = SupDiff(r.xi_inf, model.xi_star);
    s.diagnostic = r.diagnostic;
  } else {
    throw KamError(ErrorKind::kInvalidArgument,
                   "model '" + config.model +
                       "' is a frequency map; use 'verify degree' instead of 'run'");
  }
  return s;
}

namespace {

RunConfig ConfigWithFlags(const RunOptions& opts) {
  RunConfig cfg = LoadRunConfig(opts.config_path);
  if (opts.max_steps) {
    if (*opts.max_steps < 0) throw KamError(ErrorKind::kConfigError, "--max-steps must be >= 0");
    cfg.engine.max_steps = *opts.max_steps;
  }
  if (opts.tol) {
    if (!(*opts.tol > 0)) throw KamError(ErrorKind::kConfigError, "--tol must be positive");
    cfg.engine.tol = *opts.tol;
  }
  return cfg;
}

int ExitFor(const std::string& status) {
  if (status == "converged") return kExitOk;
  if (status == "error") return kExitError;
  return kExitNotMet;
}

}  // namespace

int RunCommand(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = ConfigWithFlags(opts);
    const RunSummary s = ExecuteRun(cfg, opts.out_dir);
    out << "model " << cfg.model << "\n"
        << "epsilon " << FormatDouble(s.epsilon) << "\n"
        << "status " << s.status << "\n"
        << "steps " << s.steps << "\n"
        << "conjugacy_residual " << FormatDouble(s.conjugacy_residual) << "\n"
        << "frequency_residual " << FormatDouble(s.frequency_residual) << "\n"
        << "translation " << FormatDouble(s.translation) << "\n";
    if (!s.diagnostic.empty()) out << "diagnostic " << s.diagnostic << "\n";
    return ExitFor(s.status);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int SweepThreads() {
  if (const char* env = std::getenv("KAMFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int SweepCommand(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig base;
  SweepSpec spec;
  try {
    base = ConfigWithFlags(opts);
    spec = ParseSweep(*opts.sweep);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  const int count = static_cast<int>(spec.values.size());
  std::vector<RunSummary> rows(count);
  std::vector<std::string> dirs(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      RunConfig cfg = base;
      cfg.overrides.epsilon = spec.values[i];
      std::ostringstream name;
      name << "run_" << std::setw(3) << std::setfill('0') << i;
      dirs[i] = name.str();
      try {
        rows[i] = ExecuteRun(cfg, (fs::path(opts.out_dir) / dirs[i]).string());
      } catch (const std::exception& e) {
        rows[i].status = "error";
        rows[i].epsilon = spec.values[i];
        rows[i].diagnostic = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int threads = std::min(SweepThreads(), count);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::string csv =
      "index,dir,epsilon,status,steps,conjugacy_residual,frequency_residual,translation\n";
  bool any_error = false, any_unconverged = false;
  for (int i = 0; i < count; ++i) {
    const RunSummary& s = rows[i];
    csv += std::to_string(i) + "," + dirs[i] + "," + FormatDouble(spec.values[i]) + "," +
           s.status + "," + std::to_string(s.steps) + "," +
           FormatDouble(s.conjugacy_residual) + "," + FormatDouble(s.frequency_residual) + "," +
           FormatDouble(s.translation) + "\n";
    any_error = any_error || s.status == "error";
    any_unconverged = any_unconverged || ExitFor(s.status) == kExitNotMet;
    if (s.status == "error") err << dirs[i] << ": " << s.diagnostic << "\n";
  }
  fs::create_directories(opts.out_dir);
  WriteFile(fs::path(opts.out_dir) / "sweep.csv", csv);
  out << csv;
  if (any_error) return kExitError;
  return any_unconverged ? kExitNotMet : kExitOk;
}

int VerifyDiophantine(const DiophantineOptions& o, std::ostream& out, std::ostream& err) {
  try {
    DiophantineParams p;
    p.tau = o.tau;
    p.gamma = o.gamma;
    p.k_max = o.k_max;
    if (o.period == "two_pi") {
      p.period = AnglePeriod::kTwoPi;
    } else if (o.period == "one") {
      p.period = AnglePeriod::kOne;
    } else {
      throw KamError(ErrorKind::kInvalidArgument, "--period must be two_pi or one");
    }
    std::vector<double> omega;
    for (const std::string& t : o.omega) omega.push_back(ParseOmegaToken(t, p.period));
    const DivisorReport r = CheckDiophantine(omega, p);
    Json j;
    j["omega"] = omega;
    j["gamma"] = p.gamma;
    j["tau"] = p.tau;
    j["k_max"] = p.k_max;
    j["worst_k"] = r.worst_k;
    j["worst_value"] = r.worst_value;
    j["satisfied"] = r.satisfied;
    out << j.dump(2) << "\n";
    return r.satisfied ? kExitOk : kExitNotMet;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int VerifyDegree(const DegreeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const MapCatalogEntry& e = FindCatalogEntry(o.map);
    ModelOverrides ov;
    if (!o.p.empty()) ov.target = o.p;
    FrequencyMap map;
    std::vector<double> p;
    Box box;
    if (e.kind == ModelKind::kFrequency) {
      FrequencyCase fc = e.frequency(ov);
      map = fc.map;
      p = fc.p;
      box = fc.box;
    } else if (e.kind == ModelKind::kTwist) {
      const TwistMapModel m = e.twist(ov);
      map = m.freq;
      p = m.p;
      box = m.freq.region;
    } else {
      const ParamMapModel m = e.param(ov);
      map = m.freq;
      p = m.q;
      box = m.freq.region;
    }
    int degree = 0;
    if (map.domain_dim == 1 && map.range_dim == 1) {
      degree = Degree1d(map, box.lo[0], box.hi[0], p[0]);
    } else if (map.domain_dim == 2 && map.range_dim == 2) {
      degree = Degree2d(map, box, p);
    } else {
      throw KamError(ErrorKind::kInvalidArgument,
                     "degree needs equal dimensions of 1 or 2; '" + o.map + "' maps " +
                         std::to_string(map.domain_dim) + " -> " +
                         std::to_string(map.range_dim));
    }
    Json j;
    j["map"] = o.map;
    j["p"] = p;
    j["box"] = {{"lo", box.lo}, {"hi", box.hi}};
    j["degree"] = degree;
    out << j.dump(2) << "\n";
    return degree != 0 ? kExitOk : kExitNotMet;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int VerifyRotation(const RotationOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const MapCatalogEntry& e = FindCatalogEntry(o.map);
    if (e.kind != ModelKind::kTwist) {
      throw KamError(ErrorKind::kInvalidArgument, "rotation needs a twist model");
    }
    ModelOverrides ov;
    ov.epsilon = o.epsilon;
    const TwistMapModel model = e.twist(ov);
    if (model.dim() != 1) {
      throw KamError(ErrorKind::kInvalidArgument, "rotation needs a one-dimensional model");
    }
    if (o.iters < 1) throw KamError(ErrorKind::kInvalidArgument, "--iters must be >= 1");
    const double two_pi = 2.0 * std::numbers::pi;
    const OrbitStep step = [&model, two_pi](double& t, double& a) {
      double dt, da;
      const double tt[] = {t}, aa[] = {a};
      model.Displace(tt, aa, std::span<double>(&dt, 1), std::span<double>(&da, 1));
      t = std::fmod(t + dt, two_pi);
      if (t < 0) t += two_pi;
      a += da;
      return dt;
    };
    const RotationEstimate r = RotationNumber(step, o.theta, o.r, o.iters);
    Json j;
    j["map"] = o.map;
    j["epsilon"] = model.epsilon;
    j["theta"] = o.theta;
    j["r"] = o.r;
    j["iters"] = o.iters;
    j["rotation"] = r.value;
    j["uncertainty"] = r.uncertainty;
    bool ok = std::isfinite(r.value);
    if (o.expect) {
      j["expected"] = *o.expect;
      j["difference"] = r.value - *o.expect;
      ok = ok && std::abs(r.value - *o.expect) <= o.tol;
    }
    out << j.dump(2) << "\n";
    return ok ? kExitOk : kExitNotMet;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int VerifyResidual(const ResidualOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Json rec = Json::parse(ReadFile(o.result_path));
    const Json& cfg = rec.at("config");
    const MapCatalogEntry& e = FindCatalogEntry(cfg.at("model").get<std::string>());
    ModelOverrides ov;
    ov.epsilon = rec.at("epsilon").get<double>();
    ov.seed = cfg.at("seed").get<uint64_t>();
    if (cfg.contains("target")) ov.target = cfg.at("target").get<std::vector<double>>();
    const ConjugacyChain chain = ChainFromJson(rec.at("chain").dump());
    double residual = 0.0;
    const int grid = 1024;
    auto per_axis = [grid](int n) {
      return n == 1 ? grid : static_cast<int>(std::ceil(std::pow(grid, 1.0 / n)));
    };
    if (rec.at("engine") == "twist") {
      const TwistMapModel m = e.twist(ov);
      residual = TwistConjugacyResidual(m, chain, rec.at("r_hat_inf").get<std::vector<double>>(),
                                        rec.at("rotation").get<std::vector<double>>(),
                                        per_axis(m.dim()));
    } else {
      const ParamMapModel m = e.param(ov);
      residual = ParamConjugacyResidual(m, chain, rec.at("xi_inf").get<std::vector<double>>(),
                                        per_axis(m.dim()));
    }
    Json j;
    j["result"] = o.result_path;
    j["model"] = cfg.at("model");
    j["status"] = rec.at("status");
    j["conjugacy_residual"] = residual;
    j["recorded_residual"] = rec.at("conjugacy_residual");
    j["max_residual"] = o.max_residual;
    const bool ok = residual <= o.max_residual;
    j["holds"] = ok;
    out << j.dump(2) << "\n";
    return ok ? kExitOk : kExitNotMet;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed result record: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int CatalogList(std::ostream& out) {
  out << std::left << std::setw(22) << "name" << std::setw(11) << "kind" << std::setw(10)
      << "epsilon" << std::setw(8) << "degree" << "summary\n";
  for (const MapCatalogEntry& e : Catalog()) {
    std::ostringstream eps;
    eps << e.default_epsilon;
    out << std::left << std::setw(22) << e.name << std::setw(11) << ModelKindName(e.kind)
        << std::setw(10) << (e.kind == ModelKind::kFrequency ? "-" : eps.str()) << std::setw(8)
        << (e.facts.degree ? std::to_string(*e.facts.degree) : "-") << e.summary << "\n";
  }
  return kExitOk;
}

}  // namespace kamforge::cli
