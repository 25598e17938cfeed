#include "run_config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kamforge/errors.h"

namespace kamforge::cli {
namespace {

using Json = nlohmann::json;

int LineAt(const std::string& text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void Fail(const std::string& field, const std::string& message) const {
    const size_t pos = text_.find("\"" + Leaf(field) + "\"");
    const int line = pos == std::string::npos ? 1 : LineAt(text_, pos);
    throw KamError(ErrorKind::kConfigError,
                   source_ + ":" + std::to_string(line) + ": " + field + ": " + message);
  }

  void RejectUnknown(const Json& obj, const std::string& prefix,
                     const std::set<std::string>& known) const {
    for (const auto& [key, value] : obj.items()) {
      if (!known.contains(key)) Fail(prefix + key, "unknown field");
    }
  }

  double Number(const Json& obj, const std::string& key, const std::string& path,
                double fallback) const {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) Fail(path, "expected a number");
    return v.get<double>();
  }

  int Integer(const Json& obj, const std::string& key, const std::string& path,
              int fallback) const {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) Fail(path, "expected an integer");
    return v.get<int>();
  }

  bool Bool(const Json& obj, const std::string& key, const std::string& path,
            bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_boolean()) Fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> Vector(const Json& v, const std::string& path) const {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) Fail(path, "expected a number or a non-empty array");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) Fail(path, "array entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void Positive(double v, const std::string& path) const {
    if (!(v > 0.0) || !std::isfinite(v)) Fail(path, "must be positive");
  }

 private:
  static std::string Leaf(const std::string& path) {
    const size_t dot = path.rfind('.');
    return dot == std::string::npos ? path : path.substr(dot + 1);
  }

  const std::string& text_;
  std::string source_;
};

}  // namespace

RunConfig ParseRunConfig(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw KamError(ErrorKind::kConfigError, source + ":" +
                                                std::to_string(LineAt(text, e.byte - 1)) +
                                                ": syntax: " + e.what());
  }
  const Reader rd(text, source);
  if (!doc.is_object()) rd.Fail("document", "expected a JSON object");
  rd.RejectUnknown(doc, "",
                   {"schema_version", "model", "epsilon", "target", "box", "seed", "schedule",
                    "tolerances", "max_steps", "solver_mode", "ablate_translation",
                    "diophantine", "trust_radius", "residual_grid"});

  if (!doc.contains("schema_version")) rd.Fail("schema_version", "missing");
  if (rd.Integer(doc, "schema_version", "schema_version", 0) != kSchemaVersion) {
    rd.Fail("schema_version", "unsupported version (expected " +
                                  std::to_string(kSchemaVersion) + ")");
  }
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    rd.Fail("model", "expected a catalog model name");
  }

  RunConfig cfg;
  cfg.source = source;
  cfg.model = doc.at("model").get<std::string>();
  const MapCatalogEntry* entry = nullptr;
  for (const MapCatalogEntry& e : Catalog()) {
    if (e.name == cfg.model) entry = &e;
  }
  if (entry == nullptr) rd.Fail("model", "unknown catalog model '" + cfg.model + "'");

  EngineConfig& ec = cfg.engine;
  ec.k_cap = entry->default_kcap;
  ec.diophantine = entry->diophantine;

  if (doc.contains("epsilon")) {
    const double eps = rd.Number(doc, "epsilon", "epsilon", 0.0);
    if (!(eps >= 0.0) || !std::isfinite(eps)) rd.Fail("epsilon", "must be >= 0");
    cfg.overrides.epsilon = eps;
  }
  if (doc.contains("target")) cfg.overrides.target = rd.Vector(doc.at("target"), "target");
  if (doc.contains("box")) {
    const Json& b = doc.at("box");
    if (!b.is_object() || !b.contains("lo") || !b.contains("hi")) {
      rd.Fail("box", "expected {\"lo\": [...], \"hi\": [...]}");
    }
    rd.RejectUnknown(b, "box.", {"lo", "hi"});
    Box box{rd.Vector(b.at("lo"), "box.lo"), rd.Vector(b.at("hi"), "box.hi")};
    if (box.lo.size() != box.hi.size()) rd.Fail("box.hi", "lo and hi differ in length");
    for (size_t i = 0; i < box.lo.size(); ++i) {
      if (!(box.lo[i] < box.hi[i])) rd.Fail("box.hi", "needs lo < hi on every axis");
    }
    cfg.overrides.box = box;
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_unsigned()) rd.Fail("seed", "expected a non-negative integer");
    cfg.overrides.seed = s.get<uint64_t>();
  }

  if (doc.contains("schedule")) {
    const Json& s = doc.at("schedule");
    if (!s.is_object()) rd.Fail("schedule", "expected an object");
    rd.RejectUnknown(s, "schedule.",
                     {"rho", "eta", "h0", "s0", "tau", "log_base", "k_floor", "k_cap"});
    ScheduleParams& sp = ec.schedule;
    sp.rho = rd.Number(s, "rho", "schedule.rho", sp.rho);
    sp.eta = rd.Number(s, "eta", "schedule.eta", sp.eta);
    sp.h0 = rd.Number(s, "h0", "schedule.h0", sp.h0);
    sp.s0 = rd.Number(s, "s0", "schedule.s0", sp.s0);
    sp.tau = rd.Number(s, "tau", "schedule.tau", sp.tau);
    sp.log_base = rd.Number(s, "log_base", "schedule.log_base", sp.log_base);
    rd.Positive(sp.rho, "schedule.rho");
    rd.Positive(sp.eta, "schedule.eta");
    rd.Positive(sp.h0, "schedule.h0");
    rd.Positive(sp.s0, "schedule.s0");
    rd.Positive(sp.tau, "schedule.tau");
    if (std::pow(1.0 + sp.rho, sp.eta) <= 2.0) {
      rd.Fail("schedule.eta", "needs (1 + rho)^eta > 2");
    }
    ec.k_floor = rd.Integer(s, "k_floor", "schedule.k_floor", ec.k_floor);
    ec.k_cap = rd.Integer(s, "k_cap", "schedule.k_cap", ec.k_cap);
    if (ec.k_floor < 1) rd.Fail("schedule.k_floor", "must be >= 1");
    if (ec.k_cap < ec.k_floor) rd.Fail("schedule.k_cap", "must be >= k_floor");
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    if (!t.is_object()) rd.Fail("tolerances", "expected an object");
    rd.RejectUnknown(t, "tolerances.", {"tol", "freq_tol", "guard"});
    ec.tol = rd.Number(t, "tol", "tolerances.tol", ec.tol);
    ec.freq_tol = rd.Number(t, "freq_tol", "tolerances.freq_tol", ec.freq_tol);
    ec.guard = rd.Number(t, "guard", "tolerances.guard", ec.guard);
    rd.Positive(ec.tol, "tolerances.tol");
    rd.Positive(ec.freq_tol, "tolerances.freq_tol");
    rd.Positive(ec.guard, "tolerances.guard");
  }

  ec.max_steps = rd.Integer(doc, "max_steps", "max_steps", ec.max_steps);
  if (ec.max_steps < 0) rd.Fail("max_steps", "must be >= 0");
  if (doc.contains("solver_mode")) {
    const Json& m = doc.at("solver_mode");
    if (!m.is_string() || (m != "standard" && m != "range")) {
      rd.Fail("solver_mode", "expected \"standard\" or \"range\"");
    }
    ec.range_mode = m == "range";
  }
  ec.ablate_translation =
      rd.Bool(doc, "ablate_translation", "ablate_translation", ec.ablate_translation);
  ec.trust_radius = rd.Number(doc, "trust_radius", "trust_radius", ec.trust_radius);
  rd.Positive(ec.trust_radius, "trust_radius");
  ec.residual_grid = rd.Integer(doc, "residual_grid", "residual_grid", ec.residual_grid);
  if (ec.residual_grid < 4) rd.Fail("residual_grid", "must be >= 4");

  if (doc.contains("diophantine")) {
    const Json& d = doc.at("diophantine");
    if (!d.is_object()) rd.Fail("diophantine", "expected an object");
    rd.RejectUnknown(d, "diophantine.", {"gamma", "tau", "k_max", "period", "check"});
    DiophantineParams& dp = ec.diophantine;
    dp.gamma = rd.Number(d, "gamma", "diophantine.gamma", dp.gamma);
    dp.tau = rd.Number(d, "tau", "diophantine.tau", dp.tau);
    dp.k_max = rd.Integer(d, "k_max", "diophantine.k_max", dp.k_max);
    rd.Positive(dp.gamma, "diophantine.gamma");
    rd.Positive(dp.tau, "diophantine.tau");
    if (dp.k_max < 1) rd.Fail("diophantine.k_max", "must be >= 1");
    if (d.contains("period")) {
      const Json& p = d.at("period");
      if (p == "two_pi") {
        dp.period = AnglePeriod::kTwoPi;
      } else if (p == "one") {
        dp.period = AnglePeriod::kOne;
      } else {
        rd.Fail("diophantine.period", "expected \"two_pi\" or \"one\"");
      }
    }
    ec.check_diophantine = rd.Bool(d, "check", "diophantine.check", ec.check_diophantine);
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KamError(ErrorKind::kConfigError, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path);
}

SweepSpec ParseSweep(const std::string& text) {
  auto fail = [&](const std::string& why) -> void {
    throw KamError(ErrorKind::kConfigError, "--sweep '" + text + "': " + why);
  };
  const size_t eq = text.find('=');
  const size_t dots = text.find("..");
  if (eq == std::string::npos || dots == std::string::npos || dots < eq) {
    fail("expected VAR=LO..HI:geometric|linear:COUNT");
  }
  SweepSpec spec;
  spec.variable = text.substr(0, eq);
  if (spec.variable != "eps") fail("only eps can be swept");
  const size_t c1 = text.find(':', dots);
  const size_t c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) fail("expected VAR=LO..HI:geometric|linear:COUNT");
  double lo = 0, hi = 0;
  int count = 0;
  try {
    size_t used = 0;
    const std::string slo = text.substr(eq + 1, dots - eq - 1);
    lo = std::stod(slo, &used);
    if (used != slo.size()) fail("bad lower bound");
    const std::string shi = text.substr(dots + 2, c1 - dots - 2);
    hi = std::stod(shi, &used);
    if (used != shi.size()) fail("bad upper bound");
    const std::string sc = text.substr(c2 + 1);
    count = std::stoi(sc, &used);
    if (used != sc.size()) fail("bad count");
  } catch (const std::logic_error&) {
    fail("bad number");
  }
  const std::string kind = text.substr(c1 + 1, c2 - c1 - 1);
  if (count < 1) fail("count must be >= 1");
  if (lo < 0 || hi < lo) fail("needs 0 <= LO <= HI");
  if (kind == "geometric") {
    if (!(lo > 0)) fail("geometric spacing needs LO > 0");
    for (int i = 0; i < count; ++i) {
      spec.values.push_back(count == 1 ? lo : lo * std::pow(hi / lo, double(i) / (count - 1)));
    }
  } else if (kind == "linear") {
    for (int i = 0; i < count; ++i) {
      spec.values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
  } else {
    fail("spacing must be geometric or linear");
  }
  spec.values.back() = count == 1 ? lo : hi;
  return spec;
}

}  // namespace kamforge::cli
