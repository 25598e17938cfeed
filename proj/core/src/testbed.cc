#include "kamforge/testbed.h"

#include <cmath>
#include <numbers>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

FrequencyMap LinearFrequency(double lo, double hi, double base) {
  FrequencyMap map;
  map.eval = [](std::span<const double> x) { return std::vector<double>{x[0]}; };
  map.region = Box{{lo}, {hi}};
  map.base = {base};
  return map;
}

FrequencyMap ScalarFrequency(std::function<double(double)> w, double lo, double hi,
                             double base) {
  FrequencyMap map;
  map.eval = [w = std::move(w)](std::span<const double> x) {
    return std::vector<double>{w(x[0])};
  };
  map.region = Box{{lo}, {hi}};
  map.base = {base};
  return map;
}

// Kick r1 = r + eps sin(theta) followed by theta1 = theta + w(r1) + extra.
TwistMapModel KickedTwist(std::string name, double epsilon, FrequencyMap freq,
                          std::function<double(double)> w, double extra, double r_star,
                          double p) {
  TwistMapModel model;
  model.name = std::move(name);
  model.freq = std::move(freq);
  model.epsilon = epsilon;
  model.r_star = {r_star};
  model.p = {p};
  model.intersection = true;
  model.area_preserving = true;
  model.displacement = [epsilon, w, extra](std::span<const double> t, std::span<const double> r,
                                           std::span<double> dt, std::span<double> dr) {
    dr[0] = epsilon * std::sin(t[0]);
    dt[0] = w(r[0] + dr[0]) + epsilon * extra;
  };
  model.g_pert = [](std::span<const double> t, std::span<const double>, std::span<double> out) {
    out[0] = std::sin(t[0]);
  };
  model.f_pert = [epsilon, w, extra](std::span<const double> t, std::span<const double> r,
                                     std::span<double> out) {
    const double s = std::sin(t[0]);
    if (epsilon == 0.0) {
      const double h = 1e-7 * (1.0 + std::abs(r[0]));
      out[0] = (w(r[0] + h) - w(r[0] - h)) / (2.0 * h) * s + extra;
    } else {
      out[0] = (w(r[0] + epsilon * s) - w(r[0])) / epsilon + extra;
    }
  };
  return model;
}

void RequireNonnegative(double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "epsilon must be nonnegative");
  }
}

double Factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

ParamMapModel ScalarRotation(std::string name, double epsilon, double q,
                             ParamPerturbation f) {
  RequireNonnegative(epsilon);
  ParamMapModel model;
  model.name = std::move(name);
  model.freq = LinearFrequency(q - 1.0, q + 1.0, q);
  model.perturbation = std::move(f);
  model.epsilon = epsilon;
  model.xi_star = {q};
  model.q = {q};
  return model;
}

}  // namespace

double GoldenFrequency() {
  static const double v = GoldenLikeFrequency(std::vector<int>{1});
  return v;
}

double SilverFrequency() {
  static const double v = GoldenLikeFrequency(std::vector<int>{2});
  return v;
}

TwistMapModel StandardFamily(double epsilon, double p) {
  RequireNonnegative(epsilon);
  TwistMapModel model = KickedTwist("standard", epsilon, LinearFrequency(p - 1.0, p + 1.0, p),
                                    [](double r) { return r; }, 0.0, p, p);
  model.f_pert = [](std::span<const double> t, std::span<const double>, std::span<double> out) {
    out[0] = std::sin(t[0]);
  };
  return model;
}

TwistMapModel TwistDriftFamily(double epsilon, double p) {
  RequireNonnegative(epsilon);
  if (!(p > 2.0 && p < 4.5)) {
    throw KamError(ErrorKind::kInvalidArgument, "twist_drift target must lie in (2, 4.5)");
  }
  const auto omega = [epsilon](double s) {
    return s + epsilon * (0.5 + 0.25 * std::cos(s));
  };
  TwistMapModel model = KickedTwist("twist_drift", epsilon, LinearFrequency(2.0, 4.5, p),
                                    omega, 0.0, p, p);
  model.f_pert = [epsilon](std::span<const double> t, std::span<const double> r,
                           std::span<double> out) {
    const double s = std::sin(t[0]);
    out[0] = s + 0.5 + 0.25 * std::cos(r[0] + epsilon * s);
  };
  return model;
}

FrequencyMap WeaklyConvexFrequency(int beta, double p, double r_star, double delta) {
  if (beta < 3 || beta % 2 == 0) {
    throw KamError(ErrorKind::kInvalidArgument, "beta must be an odd integer >= 3");
  }
  FrequencyMap map = ScalarFrequency(
      [beta, p, r_star](double r) { return p + std::pow(r - r_star, beta); },
      r_star - 1.0, r_star + 1.0, r_star);
  // Integer powers of negative bases: use repeated multiplication.
  map.eval = [beta, p, r_star](std::span<const double> x) {
    const double d = x[0] - r_star;
    double v = 1.0;
    for (int i = 0; i < beta; ++i) v *= d;
    return std::vector<double>{p + v};
  };
  map.modulus_lower = ModulusOfContinuity::Power(beta, std::ldexp(1.0, 1 - beta));
  map.modulus_upper = ModulusOfContinuity::Lipschitz();
  map.upper_seminorm = beta;  // |d/dr (r - r*)^beta| <= beta on the unit window
  map.ball_radius = delta;
  return map;
}

TwistMapModel WeaklyConvexTwist(double epsilon, double p, int beta) {
  RequireNonnegative(epsilon);
  FrequencyMap freq = WeaklyConvexFrequency(beta, p, p);
  const auto w = [eval = freq.eval](double r) {
    const double x[1] = {r};
    return eval(x)[0];
  };
  return KickedTwist("weakly_convex_twist", epsilon, std::move(freq), w, 0.5, p, p);
}

TwistMapModel MonotoneCubicTwist(double epsilon, double p) {
  RequireNonnegative(epsilon);
  const auto w = [](double r) { return r + 0.1 * r * r * r; };
  double r = p;
  for (int it = 0; it < 100; ++it) {
    const double dr = (w(r) - p) / (1.0 + 0.3 * r * r);
    r -= dr;
    if (std::abs(dr) <= 1e-16 * (1.0 + std::abs(r))) break;
  }
  FrequencyMap freq = ScalarFrequency(w, r - 1.0, r + 1.0, r);
  freq.upper_seminorm = 1.0 + 0.3 * (std::abs(r) + 1.0) * (std::abs(r) + 1.0);
  return KickedTwist("monotone_cubic", epsilon, std::move(freq), w, 0.0, r, p);
}

TwistMapModel KickShearFamily(double epsilon, double p) {
  RequireNonnegative(epsilon);
  TwistMapModel model;
  model.name = "kick_shear";
  model.freq = LinearFrequency(p - 1.0, p + 1.0, p);
  model.epsilon = epsilon;
  model.r_star = {p};
  model.p = {p};
  model.intersection = false;
  model.area_preserving = false;
  model.f_pert = [](std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  model.g_pert = [](std::span<const double> t, std::span<const double>, std::span<double> out) {
    out[0] = std::sin(t[0]);
  };
  return model;
}

TwistMapModel ConstantDriftFamily(double epsilon, double p) {
  RequireNonnegative(epsilon);
  TwistMapModel model;
  model.name = "constant_drift";
  model.freq = LinearFrequency(p - 1.0, p + 1.0, p);
  model.epsilon = epsilon;
  model.r_star = {p};
  model.p = {p};
  model.intersection = true;
  model.area_preserving = true;
  model.f_pert = [](std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = 1.0;
  };
  model.g_pert = [](std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  return model;
}

NowhereHolderField::NowhereHolderField(uint64_t seed, double amplitude, int terms)
    : amplitude_(amplitude) {
  if (!(amplitude >= 0.0) || terms < 1) {
    throw KamError(ErrorKind::kInvalidArgument, "bad nowhere-Holder field parameters");
  }
  UniformSource rng(seed);
  for (int j = 1; j <= terms; ++j) {
    weight_.push_back(1.0 / Factorial(j));
    freq_.push_back(3e7 * std::exp(j - 1.0));
    phase_.push_back(2.0 * std::numbers::pi * rng.Next());
  }
}

double NowhereHolderField::operator()(double xi) const {
  if (amplitude_ == 0.0) return 0.0;
  double s = 0.0;
  for (size_t j = 0; j < weight_.size(); ++j) {
    s += weight_[j] * std::cos(freq_[j] * xi + phase_[j]);
  }
  return amplitude_ * s;
}

double NowhereHolderField::UniformBound() const {
  double s = 0.0;
  for (double w : weight_) s += w;
  return amplitude_ * s;
}

ModulusOfContinuity NowhereHolderField::EmpiricalGauge(double center, int samples_per_scale,
                                                       uint64_t seed) const {
  UniformSource rng(seed);
  std::vector<double> xs, values;
  const double floor = 1e-300;
  for (int j = 48; j >= 0; --j) {
    const double delta = std::ldexp(1.0, -j);
    double worst = 0.0;
    for (int i = 0; i < samples_per_scale; ++i) {
      const double x = rng.Next(center - 0.5, center + 0.5);
      worst = std::max(worst, std::abs((*this)(x + delta) - (*this)(x)));
    }
    xs.push_back(delta);
    values.push_back(std::max(2.0 * worst, floor));
  }
  return ModulusOfContinuity::Tabulated("empirical", std::move(xs), std::move(values));
}

NowhereHolderField NowhereHoelderParameterField(uint64_t seed, double amplitude) {
  return NowhereHolderField(seed, amplitude);
}

double EstimateHolderExponent(const std::function<double(double)>& f, double center,
                              int min_exp, int max_exp, int samples_per_scale,
                              uint64_t seed) {
  if (max_exp - min_exp < 1) {
    throw KamError(ErrorKind::kTooFewPoints, "need at least two scales");
  }
  UniformSource rng(seed);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int j = min_exp; j <= max_exp; ++j) {
    const double delta = std::ldexp(1.0, -j);
    double worst = 0.0;
    for (int i = 0; i < samples_per_scale; ++i) {
      const double x = rng.Next(center - 0.5, center + 0.5);
      worst = std::max(worst, std::abs(f(x + delta) - f(x)));
    }
    if (worst <= 0.0) continue;
    const double lx = std::log(delta), ly = std::log(worst);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) throw KamError(ErrorKind::kTooFewPoints, "field has no increments");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

ParamMapModel RotationGoldenFamily(double epsilon, double q) {
  return ScalarRotation("rotation_golden", epsilon, q,
                        [](std::span<const double> t, std::span<const double>,
                           std::span<double> out) { out[0] = 1.0 + std::cos(t[0]); });
}

ParamMapModel RotationZeroMeanFamily(double epsilon, double q) {
  return ScalarRotation("rotation_zero_mean", epsilon, q,
                        [](std::span<const double> t, std::span<const double>,
                           std::span<double> out) { out[0] = std::cos(t[0]); });
}

ParamMapModel RoughRotationFamily(double epsilon, double q, uint64_t seed) {
  const NowhereHolderField field(seed, 1.0);
  ParamMapModel model = ScalarRotation(
      "rough_rotation", epsilon, q,
      [field](std::span<const double> t, std::span<const double> xi, std::span<double> out) {
        const double F = field(xi[0]);
        out[0] = F + (1.0 + 0.1 * F) * std::cos(t[0]) + 0.2 * std::sin(2.0 * t[0]);
      });
  return model;
}

ParamMapModel Rotation2dFamily(double epsilon, std::span<const double> q) {
  RequireNonnegative(epsilon);
  if (q.size() != 2) throw KamError(ErrorKind::kInvalidArgument, "rotation_2d needs q in R^2");
  ParamMapModel model;
  model.name = "rotation_2d";
  model.freq.domain_dim = 2;
  model.freq.range_dim = 2;
  model.freq.eval = [](std::span<const double> x) {
    return std::vector<double>{x[0], x[1]};
  };
  model.freq.region = Box::Around(q, 1.0);
  model.freq.base.assign(q.begin(), q.end());
  model.perturbation = [](std::span<const double> t, std::span<const double> xi,
                          std::span<double> out) {
    const double shift = 0.1 * std::cos(xi[0] - xi[1]);
    out[0] = 0.2 + shift + std::cos(t[0]) + 0.5 * std::sin(t[0] + t[1]);
    out[1] = -0.1 + std::sin(t[1]) + 0.3 * std::cos(t[0] - t[1]);
  };
  model.epsilon = epsilon;
  model.xi_star.assign(q.begin(), q.end());
  model.q.assign(q.begin(), q.end());
  return model;
}

std::string ModelKindName(ModelKind k) {
  switch (k) {
    case ModelKind::kTwist:
      return "twist";
    case ModelKind::kParam:
      return "param";
    case ModelKind::kFrequency:
      return "frequency";
  }
  return "unknown";
}

namespace {

double ScalarTarget(const ModelOverrides& o, double fallback) {
  if (!o.target) return fallback;
  if (o.target->size() != 1) {
    throw KamError(ErrorKind::kInvalidArgument, "target must have one component");
  }
  return (*o.target)[0];
}

double Epsilon(const ModelOverrides& o, double fallback) {
  return o.epsilon ? *o.epsilon : fallback;
}

template <typename Model>
Model WithBox(Model model, const ModelOverrides& o) {
  if (o.box) {
    if (o.box->dim() != model.freq.domain_dim) {
      throw KamError(ErrorKind::kInvalidArgument, "box has wrong dimension");
    }
    model.freq.region = *o.box;
  }
  return model;
}

FrequencyCase MakeCase(FrequencyMap map, std::vector<double> p, const ModelOverrides& o) {
  FrequencyCase c;
  if (o.box) map.region = *o.box;
  if (o.target) p = *o.target;
  c.box = map.region;
  c.map = std::move(map);
  c.p = std::move(p);
  return c;
}

FrequencyMap PlanarMap(std::function<std::vector<double>(std::span<const double>)> f,
                       int m, int n, Box region) {
  FrequencyMap map;
  map.domain_dim = m;
  map.range_dim = n;
  map.eval = std::move(f);
  map.region = std::move(region);
  map.base = std::vector<double>(m, 0.0);
  return map;
}

std::vector<MapCatalogEntry> BuildCatalog() {
  std::vector<MapCatalogEntry> c;
  const double golden = GoldenFrequency();

  auto twist = [&](std::string name, std::string summary, double eps, KnownFacts facts,
                   std::function<TwistMapModel(double, double)> make, double p0) {
    MapCatalogEntry e;
    e.name = std::move(name);
    e.summary = std::move(summary);
    e.kind = ModelKind::kTwist;
    e.facts = facts;
    e.default_epsilon = eps;
    e.twist = [make, eps, p0](const ModelOverrides& o) {
      return WithBox(make(Epsilon(o, eps), ScalarTarget(o, p0)), o);
    };
    c.push_back(std::move(e));
  };
  KnownFacts ap;
  ap.rotation_at_zero = golden;
  ap.degree = 1;
  ap.area_preserving = true;
  twist("standard", "kicked rotor theta1 = theta + r1, r1 = r + eps sin theta", 1e-4, ap,
        StandardFamily, golden);
  twist("twist_drift", "standard kick with Omega(s) = s + eps (0.5 + 0.25 cos s) on [2, 4.5]",
        1e-4, ap, TwistDriftFamily, golden);
  {
    KnownFacts f = ap;
    f.lower_gauge_beta = 3;
    twist("weakly_convex_twist", "omega(r) = p + (r - r*)^3, standard kick, drift 0.5 eps",
          1e-5, f, [](double e, double p) { return WeaklyConvexTwist(e, p, 3); }, golden);
  }
  twist("monotone_cubic", "omega(r) = r + 0.1 r^3, standard kick", 1e-4, ap,
        MonotoneCubicTwist, golden);
  {
    KnownFacts f;
    f.rotation_at_zero = golden;
    f.degree = 1;
    twist("kick_shear", "f = 0, g = sin theta, omega(r) = r", 1e-3, f, KickShearFamily,
          golden);
  }
  twist("constant_drift", "f = 1, g = 0, omega(r) = r", 1e-3, ap, ConstantDriftFamily, golden);

  auto param = [&](std::string name, std::string summary, double eps,
                   std::function<ParamMapModel(double, double, uint64_t)> make) {
    MapCatalogEntry e;
    e.name = std::move(name);
    e.summary = std::move(summary);
    e.kind = ModelKind::kParam;
    e.facts.rotation_at_zero = golden;
    e.facts.degree = 1;
    e.default_epsilon = eps;
    e.param = [make, eps, golden](const ModelOverrides& o) {
      return WithBox(make(Epsilon(o, eps), ScalarTarget(o, golden), o.seed), o);
    };
    c.push_back(std::move(e));
  };
  param("rotation_golden", "theta + xi + eps (1 + cos theta)", 1e-4,
        [](double e, double q, uint64_t) { return RotationGoldenFamily(e, q); });
  param("rotation_zero_mean", "theta + xi + eps cos theta", 1e-3,
        [](double e, double q, uint64_t) { return RotationZeroMeanFamily(e, q); });
  param("rough_rotation", "rotation with nowhere Holder dependence on xi", 1e-5,
        [](double e, double q, uint64_t seed) { return RoughRotationFamily(e, q, seed); });
  {
    MapCatalogEntry e;
    e.name = "rotation_2d";
    e.summary = "two-torus rotation, q = 2 pi (golden, silver)";
    e.kind = ModelKind::kParam;
    e.facts.degree = 1;
    e.default_epsilon = 1e-4;
    e.default_kcap = 16;
    e.diophantine.gamma = 0.1;
    e.diophantine.tau = 2.0;
    e.param = [golden](const ModelOverrides& o) {
      std::vector<double> q = {golden, SilverFrequency()};
      if (o.target) q = *o.target;
      return WithBox(Rotation2dFamily(Epsilon(o, 1e-4), q), o);
    };
    c.push_back(std::move(e));
  }

  auto freq = [&](std::string name, std::string summary, std::optional<int> degree,
                  std::function<FrequencyCase(const ModelOverrides&)> make) {
    MapCatalogEntry e;
    e.name = std::move(name);
    e.summary = std::move(summary);
    e.kind = ModelKind::kFrequency;
    e.facts.degree = degree;
    e.frequency = std::move(make);
    c.push_back(std::move(e));
  };
  const Box unit1{{-1.0}, {1.0}};
  const Box unit2{{-1.0, -1.0}, {1.0, 1.0}};
  freq("identity_1d", "omega(r) = r on [-1, 1], p = 0", 1, [unit1](const ModelOverrides& o) {
    return MakeCase(PlanarMap([](auto x) { return std::vector<double>{x[0]}; }, 1, 1, unit1),
                    {0.0}, o);
  });
  freq("reversed_1d", "omega(r) = -r on [-1, 1], p = 0", -1, [unit1](const ModelOverrides& o) {
    return MakeCase(PlanarMap([](auto x) { return std::vector<double>{-x[0]}; }, 1, 1, unit1),
                    {0.0}, o);
  });
  freq("square_1d", "omega(r) = r^2 on [-1, 1], p = 0.5", 0, [unit1](const ModelOverrides& o) {
    return MakeCase(
        PlanarMap([](auto x) { return std::vector<double>{x[0] * x[0]}; }, 1, 1, unit1), {0.5},
        o);
  });
  freq("identity_2d", "omega = id on [-1, 1]^2, p = 0", 1, [unit2](const ModelOverrides& o) {
    return MakeCase(
        PlanarMap([](auto x) { return std::vector<double>{x[0], x[1]}; }, 2, 2, unit2),
        {0.0, 0.0}, o);
  });
  freq("complex_square", "omega(z) = z^2 on [-1, 1]^2, p = (0.1, 0)", 2,
       [unit2](const ModelOverrides& o) {
         return MakeCase(PlanarMap(
                             [](auto x) {
                               return std::vector<double>{x[0] * x[0] - x[1] * x[1],
                                                          2.0 * x[0] * x[1]};
                             },
                             2, 2, unit2),
                         {0.1, 0.0}, o);
       });
  freq("cubic", "omega(r) = r^3 on [-1, 1], p = 0", 1, [](const ModelOverrides& o) {
    FrequencyMap map = WeaklyConvexFrequency(3, 0.0, 0.0);
    return MakeCase(std::move(map), {0.0}, o);
  });
  freq("line_1to2", "omega(xi) = (xi, 2 xi) on [-1, 1], p = (0.3, 0.6)", std::nullopt,
       [unit1](const ModelOverrides& o) {
         return MakeCase(PlanarMap([](auto x) { return std::vector<double>{x[0], 2.0 * x[0]}; },
                                   1, 2, unit1),
                         {0.3, 0.6}, o);
       });
  freq("sum_2to1", "omega(xi) = xi_1 + xi_2 on [-1, 1]^2, p = 0.5", std::nullopt,
       [unit2](const ModelOverrides& o) {
         return MakeCase(PlanarMap([](auto x) { return std::vector<double>{x[0] + x[1]}; }, 2,
                                   1, unit2),
                         {0.5}, o);
       });
  return c;
}

}  // namespace

const std::vector<MapCatalogEntry>& Catalog() {
  static const std::vector<MapCatalogEntry> catalog = BuildCatalog();
  return catalog;
}

const MapCatalogEntry& FindCatalogEntry(const std::string& name) {
  for (const MapCatalogEntry& e : Catalog()) {
    if (e.name == name) return e;
  }
  throw KamError(ErrorKind::kInvalidArgument, "unknown catalog model '" + name + "'");
}

double EstimateJacobianDeterminant(const TwistMapModel& model, double theta, double r,
                                   double h) {
  auto image = [&](double t, double a, double& t1, double& a1) {
    double dt, dr;
    const double tt[1] = {t}, rr[1] = {a};
    model.Displace(tt, rr, std::span<double>(&dt, 1), std::span<double>(&dr, 1));
    t1 = t + dt;
    a1 = a + dr;
  };
  double tp, rp, tm, rm, tq, rq, tn, rn;
  image(theta + h, r, tp, rp);
  image(theta - h, r, tm, rm);
  image(theta, r + h, tq, rq);
  image(theta, r - h, tn, rn);
  const double a = (tp - tm) / (2 * h), b = (tq - tn) / (2 * h);
  const double c = (rp - rm) / (2 * h), d = (rq - rn) / (2 * h);
  return a * d - b * c;
}

}  // namespace kamforge
