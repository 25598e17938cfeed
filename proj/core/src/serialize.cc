#include "kamforge/serialize.h"

#include "json.hpp"
#include "kamforge/errors.h"

namespace kamforge {
namespace {

using Json = nlohmann::ordered_json;

Json SeriesJson(const FourierSeries& f) {
  Json entries = Json::array();
  for (int i = 0; i < f.num_modes(); ++i) {
    bool nonzero = false;
    for (int c = 0; c < f.value_dim(); ++c) nonzero |= f.coeff(i, c) != Complex(0.0, 0.0);
    if (!nonzero) continue;
    Json row = Json::array();
    for (int k : f.mode(i)) row.push_back(k);
    for (int c = 0; c < f.value_dim(); ++c) {
      row.push_back(Json::array({f.coeff(i, c).real(), f.coeff(i, c).imag()}));
    }
    entries.push_back(std::move(row));
  }
  Json j;
  j["dim"] = f.dim();
  j["value_dim"] = f.value_dim();
  j["cutoff"] = f.cutoff();
  j["real_valued"] = f.real_valued();
  j["entries"] = std::move(entries);
  return j;
}

FourierSeries SeriesFrom(const Json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int value_dim = j.at("value_dim").get<int>();
    const int cutoff = j.at("cutoff").get<int>();
    const bool real = j.value("real_valued", true);
    std::vector<std::pair<MultiIndex, std::vector<Complex>>> entries;
    for (const Json& row : j.at("entries")) {
      if (static_cast<int>(row.size()) != dim + value_dim) {
        throw KamError(ErrorKind::kInvalidArgument, "series entry has wrong length");
      }
      MultiIndex k(dim);
      for (int a = 0; a < dim; ++a) k[a] = row[a].get<int>();
      std::vector<Complex> v(value_dim);
      for (int c = 0; c < value_dim; ++c) {
        v[c] = Complex(row[dim + c].at(0).get<double>(), row[dim + c].at(1).get<double>());
      }
      entries.emplace_back(std::move(k), std::move(v));
    }
    return FourierSeries::FromEntries(dim, value_dim, cutoff, entries, real);
  } catch (const Json::exception& e) {
    throw KamError(ErrorKind::kInvalidArgument, std::string("bad series record: ") + e.what());
  }
}

Json ChainJson(const ConjugacyChain& chain) {
  Json parts = Json::array();
  for (const ChainPart& p : chain.parts()) {
    Json part;
    part["angle"] = SeriesJson(p.angle);
    if (p.action) {
      part["action"] = SeriesJson(*p.action);
      part["center"] = p.center;
    }
    parts.push_back(std::move(part));
  }
  Json ledger = Json::array();
  for (const LedgerStep& s : chain.translations().steps()) {
    ledger.push_back({{"nu", s.nu},
                      {"shift", s.shift},
                      {"shift_norm", s.shift_norm},
                      {"mu", s.mu},
                      {"residual", s.residual}});
  }
  Json j;
  j["dim"] = chain.dim();
  j["parts"] = std::move(parts);
  j["translations"] = std::move(ledger);
  j["cumulative_shift"] = chain.translations().cumulative();
  return j;
}

Json MetricsJson(const std::vector<StepMetrics>& metrics) {
  Json rows = Json::array();
  for (const StepMetrics& m : metrics) {
    rows.push_back({{"nu", m.nu},
                    {"K", m.cutoff},
                    {"f_norm_grid", m.f_norm_grid},
                    {"f_norm_coeff", m.f_norm_coeff},
                    {"g_norm_grid", m.g_norm_grid},
                    {"shift", m.shift},
                    {"shift_sum", m.shift_sum},
                    {"freq_residual", m.freq_residual},
                    {"transform_norm", m.transform_norm},
                    {"intersection_margin", m.intersection_margin}});
  }
  return rows;
}

std::string Dump(const Json& j, int indent) { return j.dump(indent) + "\n"; }

}  // namespace

std::string SeriesToJson(const FourierSeries& f) { return SeriesJson(f).dump(); }

FourierSeries SeriesFromJson(const std::string& text) {
  try {
    return SeriesFrom(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw KamError(ErrorKind::kInvalidArgument, std::string("bad series record: ") + e.what());
  }
}

std::string ChainToJson(const ConjugacyChain& chain) { return ChainJson(chain).dump(); }

ConjugacyChain ChainFromJson(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ConjugacyChain chain(j.at("dim").get<int>());
    for (const Json& part : j.at("parts")) {
      FourierSeries u = SeriesFrom(part.at("angle"));
      if (part.contains("action")) {
        chain.Append(std::move(u), SeriesFrom(part.at("action")),
                     part.at("center").get<std::vector<double>>());
      } else {
        chain.Append(std::move(u));
      }
    }
    for (const Json& s : j.at("translations")) {
      chain.translations().Append(s.at("nu").get<int>(),
                                  s.at("shift").get<std::vector<double>>(),
                                  s.at("mu").get<double>(), s.at("residual").get<double>());
    }
    return chain;
  } catch (const Json::exception& e) {
    throw KamError(ErrorKind::kInvalidArgument, std::string("bad chain record: ") + e.what());
  }
}

std::string ParamResultToJson(const ParamResult& result, const ParamMapModel& model,
                              int indent) {
  Json j;
  j["engine"] = "param";
  j["model"] = model.name;
  j["epsilon"] = model.epsilon;
  j["status"] = RunStatusName(result.status);
  j["converged"] = result.converged;
  j["steps"] = result.metrics.empty() ? 0 : result.metrics.back().nu;
  j["q"] = model.q;
  j["xi_star"] = model.xi_star;
  j["xi_inf"] = result.xi_inf;
  j["conjugacy_residual"] = result.conjugacy_residual;
  j["frequency_residual"] = result.frequency_residual;
  j["diagnostic"] = result.diagnostic;
  j["metrics"] = MetricsJson(result.metrics);
  j["chain"] = ChainJson(result.chain);
  return Dump(j, indent);
}

std::string TwistResultToJson(const TwistResult& result, const TwistMapModel& model,
                              int indent) {
  Json j;
  j["engine"] = "twist";
  j["model"] = model.name;
  j["epsilon"] = model.epsilon;
  j["status"] = RunStatusName(result.status);
  j["converged"] = result.converged;
  j["steps"] = result.metrics.empty() ? 0 : result.metrics.back().nu;
  j["p"] = model.p;
  j["r_star"] = model.r_star;
  j["r_hat_inf"] = result.r_hat_inf;
  j["r_tilde"] = result.r_tilde;
  j["rotation"] = result.rotation;
  j["shift_sum"] = result.shift_sum;
  j["degree"] = result.degree;
  j["conjugacy_residual"] = result.conjugacy_residual;
  j["frequency_residual"] = result.frequency_residual;
  j["diagnostic"] = result.diagnostic;
  j["metrics"] = MetricsJson(result.metrics);
  j["chain"] = ChainJson(result.chain);
  return Dump(j, indent);
}

}  // namespace kamforge
