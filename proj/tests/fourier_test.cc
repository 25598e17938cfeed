#include "kamforge/fourier.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "kamforge/errors.h"
#include "kamforge/frequency_map.h"

namespace kamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Random real series with |c_k| <= exp(-decay |k|).
FourierSeries RandomSeries(int dim, int value_dim, int cutoff, double decay, uint64_t seed) {
  FourierSeries f(dim, value_dim, cutoff, /*real_valued=*/true);
  UniformSource rng(seed);
  for (int i = 0; i < f.num_modes(); ++i) {
    const auto k = f.mode(i);
    std::vector<int> neg(k.begin(), k.end());
    for (int& x : neg) x = -x;
    const int j = f.IndexOf(neg);
    if (j < i) continue;
    const double scale = std::exp(-decay * L1Norm(k));
    for (int c = 0; c < value_dim; ++c) {
      Complex v(rng.Next(-1, 1) * scale, rng.Next(-1, 1) * scale);
      if (j == i) v = Complex(v.real(), 0.0);
      f.set_coeff(i, c, v);
      f.set_coeff(j, c, std::conj(v));
    }
  }
  return f;
}

// Direct sum of c_k exp(i k.theta), real part.
double DirectSum(const FourierSeries& f, std::span<const double> theta, int component) {
  Complex s(0.0, 0.0);
  for (int i = 0; i < f.num_modes(); ++i) {
    double phase = 0.0;
    const auto k = f.mode(i);
    for (size_t a = 0; a < k.size(); ++a) phase += k[a] * theta[a];
    s += f.coeff(i, component) * std::polar(1.0, phase);
  }
  return s.real();
}

TEST(ModeTable, CountsMatchLatticeBall) {
  for (int K : {0, 1, 5, 12}) {
    EXPECT_EQ(GetModeTable(1, K)->num_modes(), 2 * K + 1);
    EXPECT_EQ(GetModeTable(2, K)->num_modes(), 2 * K * K + 2 * K + 1);
  }
}

TEST(ModeTable, IndexOfRoundTrips) {
  const auto table = GetModeTable(2, 6);
  for (int i = 0; i < table->num_modes(); ++i) EXPECT_EQ(table->IndexOf(table->mode(i)), i);
  const int outside[2] = {4, 3};
  EXPECT_EQ(table->IndexOf(outside), -1);
}

TEST(FourierSeries, FromEntriesRejectsNonHermitian) {
  using Entry = std::pair<MultiIndex, std::vector<Complex>>;
  const std::vector<Entry> bad = {{{1}, {Complex(1.0, 0.0)}}};
  EXPECT_THROW(FourierSeries::FromEntries(1, 1, 2, bad, true), KamError);
  const std::vector<Entry> good = {{{1}, {Complex(0.5, 0.25)}}, {{-1}, {Complex(0.5, -0.25)}}};
  const FourierSeries f = FourierSeries::FromEntries(1, 1, 2, good, true);
  EXPECT_EQ(f.HermitianDefect(), 0.0);
  const double theta[1] = {0.7};
  double v[1];
  f.EvaluateReal(theta, v);
  EXPECT_NEAR(v[0], std::cos(0.7) - 0.5 * std::sin(0.7), 1e-15);
}

TEST(FourierSeries, EvaluateRealMatchesDirectSum) {
  const FourierSeries f = RandomSeries(2, 2, 7, 0.3, 11);
  UniformSource rng(5);
  for (int t = 0; t < 20; ++t) {
    const double theta[2] = {rng.Next(0, kTwoPi), rng.Next(0, kTwoPi)};
    double v[2];
    f.EvaluateReal(theta, v);
    EXPECT_NEAR(v[0], DirectSum(f, theta, 0), 1e-13);
    EXPECT_NEAR(v[1], DirectSum(f, theta, 1), 1e-13);
  }
}

TEST(FourierSeries, JacobianMatchesCentralDifference) {
  const FourierSeries f = RandomSeries(2, 2, 6, 0.4, 3);
  const double theta[2] = {0.3, 2.1};
  double v[2], jac[4];
  f.EvaluateReal(theta, v, jac);
  const double h = 1e-6;
  for (int a = 0; a < 2; ++a) {
    double tp[2] = {theta[0], theta[1]}, tm[2] = {theta[0], theta[1]};
    tp[a] += h;
    tm[a] -= h;
    double vp[2], vm[2];
    f.EvaluateReal(tp, vp);
    f.EvaluateReal(tm, vm);
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(jac[c * 2 + a], (vp[c] - vm[c]) / (2 * h), 1e-8);
  }
}

TEST(FourierSeries, ComplexEvaluateAgreesOnRealPoints) {
  const FourierSeries f = RandomSeries(1, 1, 9, 0.2, 8);
  const Complex z[1] = {Complex(1.3, 0.0)};
  const double x[1] = {1.3};
  double v[1];
  f.EvaluateReal(x, v);
  EXPECT_NEAR(f.Evaluate(z)[0].real(), v[0], 1e-14);
  EXPECT_NEAR(f.Evaluate(z)[0].imag(), 0.0, 1e-14);
}

TEST(FourierSeries, ArithmeticAndCutoff) {
  const FourierSeries a = RandomSeries(1, 1, 5, 0.1, 1);
  const FourierSeries b = RandomSeries(1, 1, 3, 0.1, 2);
  const FourierSeries sum = a + b;
  const FourierSeries back = sum - b;
  for (int i = 0; i < a.num_modes(); ++i) {
    EXPECT_NEAR(std::abs(back.Coeff(a.mode(i)) - a.coeff(i)), 0.0, 1e-15);
  }
  const FourierSeries wide = a.WithCutoff(9);
  EXPECT_EQ(wide.cutoff(), 9);
  const int k7[1] = {7};
  EXPECT_EQ(wide.Coeff(k7), Complex(0.0, 0.0));
  const FourierSeries narrow = a.WithCutoff(2);
  EXPECT_EQ(narrow.num_modes(), 5);
  const FourierSeries twice = 2.0 * a;
  EXPECT_EQ(twice.coeff(3), 2.0 * a.coeff(3));
}

TEST(Analyze, RecoversBandLimitedSeries1d) {
  const FourierSeries f = RandomSeries(1, 1, 12, 0.0, 21);
  const UniformGrid grid{1, CompositionGridSize(12)};
  const std::vector<Complex> samples = SynthesizeGrid(f, grid);
  const FourierSeries g = Analyze(grid, 1, samples, 12, true);
  for (int i = 0; i < f.num_modes(); ++i) EXPECT_NEAR(std::abs(g.coeff(i) - f.coeff(i)), 0.0, 1e-14);
}

TEST(Analyze, RecoversBandLimitedSeries2d) {
  const FourierSeries f = RandomSeries(2, 2, 6, 0.1, 4);
  const UniformGrid grid{2, CompositionGridSize(6)};
  const std::vector<Complex> samples = SynthesizeGrid(f, grid);
  const FourierSeries g = Analyze(grid, 2, samples, 6, true);
  for (int i = 0; i < f.num_modes(); ++i) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::abs(g.coeff(i, c) - f.coeff(i, c)), 0.0, 1e-14);
  }
}

TEST(Analyze, RejectsCoarseGrid) {
  const UniformGrid grid{1, 10};
  std::vector<double> samples(10, 0.0);
  EXPECT_THROW(AnalyzeReal(grid, 1, samples, 5), KamError);
}

TEST(Analyze, ReadsKnownTrigonometricPolynomial) {
  const UniformGrid grid{1, 32};
  std::vector<double> samples(32);
  for (int j = 0; j < 32; ++j) {
    const double t = kTwoPi * j / 32;
    samples[j] = 1.0 + 2.0 * std::cos(t) - 0.5 * std::sin(3 * t);
  }
  const FourierSeries f = AnalyzeReal(grid, 1, samples, 8);
  const int k0[1] = {0}, k1[1] = {1}, k3[1] = {3}, km3[1] = {-3};
  EXPECT_NEAR(f.Coeff(k0).real(), 1.0, 1e-15);
  EXPECT_NEAR(f.Coeff(k1).real(), 1.0, 1e-15);
  EXPECT_NEAR(f.Coeff(k3).imag(), 0.25, 1e-15);
  EXPECT_NEAR(f.Coeff(km3).imag(), -0.25, 1e-15);
}

TEST(Synthesize, ImaginaryShiftScalesModes) {
  // exp(i theta) at theta + i h has modulus exp(-h).
  using Entry = std::pair<MultiIndex, std::vector<Complex>>;
  const std::vector<Entry> e = {{{1}, {Complex(1.0, 0.0)}}};
  const FourierSeries f = FourierSeries::FromEntries(1, 1, 1, e, false);
  const UniformGrid grid{1, 8};
  const double shift[1] = {0.5};
  for (const Complex& v : SynthesizeGrid(f, grid, shift)) EXPECT_NEAR(std::abs(v), std::exp(-0.5), 1e-15);
}

TEST(StripNorm, CoefficientWeightedIsWeightedL1) {
  const FourierSeries f = RandomSeries(1, 1, 6, 0.5, 9);
  double expected = 0.0;
  for (int i = 0; i < f.num_modes(); ++i) expected += std::abs(f.coeff(i)) * std::exp(0.3 * L1Norm(f.mode(i)));
  EXPECT_NEAR(StripNorm(f, 0.3, StripNormFlavor::kCoeffWeighted), expected, 1e-14);
}

TEST(StripNorm, GridSupBoundedByCoefficientNorm) {
  for (uint64_t seed = 1; seed < 6; ++seed) {
    const FourierSeries f = RandomSeries(2, 1, 5, 0.2, seed);
    for (double h : {0.0, 0.2}) {
      const double grid = StripNorm(f, h, StripNormFlavor::kGridSup);
      EXPECT_LE(grid, StripNorm(f, h, StripNormFlavor::kCoeffWeighted) * (1 + 1e-14));
      EXPECT_GT(grid, 0.0);
    }
  }
}

TEST(StripNorm, GridSupOfCosine) {
  using Entry = std::pair<MultiIndex, std::vector<Complex>>;
  const std::vector<Entry> e = {{{1}, {Complex(0.5, 0.0)}}, {{-1}, {Complex(0.5, 0.0)}}};
  const FourierSeries f = FourierSeries::FromEntries(1, 1, 1, e, true);
  EXPECT_NEAR(StripNorm(f, 0.0, StripNormFlavor::kGridSup), 1.0, 1e-15);
  // |cos(i h)| = cosh h at theta = 0.
  EXPECT_NEAR(StripNorm(f, 0.4, StripNormFlavor::kGridSup), std::cosh(0.4), 1e-14);
}

TEST(Truncate, SplitsMeanBandAndTail) {
  const FourierSeries f = RandomSeries(1, 2, 10, 0.3, 17);
  const Truncation t = Truncate(f, 4, 0.1);
  for (int c = 0; c < 2; ++c) EXPECT_EQ(t.mean[c], f.coeff(f.ZeroIndex(), c));
  EXPECT_EQ(t.truncated.cutoff(), 4);
  EXPECT_EQ(t.truncated.coeff(t.truncated.ZeroIndex(), 0), Complex(0.0, 0.0));
  double tail = 0.0;
  for (int i = 0; i < f.num_modes(); ++i) {
    const int l = L1Norm(f.mode(i));
    if (l > 4) tail += std::abs(f.coeff(i, 0)) * std::exp(0.1 * l);
  }
  double tail1 = 0.0;
  for (int i = 0; i < f.num_modes(); ++i) {
    const int l = L1Norm(f.mode(i));
    if (l > 4) tail1 += std::abs(f.coeff(i, 1)) * std::exp(0.1 * l);
  }
  EXPECT_NEAR(t.remainder_norm, std::max(tail, tail1), 1e-15);
  EXPECT_THROW(Truncate(f, 11), KamError);
}

TEST(ModulusSeminorm, LinearFamilyHasUnitLipschitzSeminorm) {
  // f(theta, xi) = xi cos theta: |f(xi) - f(xi')|_0 = |xi - xi'|.
  std::vector<ParameterSample> samples;
  using Entry = std::pair<MultiIndex, std::vector<Complex>>;
  for (double xi : {0.0, 0.1, 0.35, 0.8}) {
    const std::vector<Entry> e = {{{1}, {Complex(xi / 2, 0.0)}}, {{-1}, {Complex(xi / 2, 0.0)}}};
    samples.push_back({{xi}, FourierSeries::FromEntries(1, 1, 1, e, true)});
  }
  EXPECT_NEAR(ModulusSeminorm(samples, ModulusOfContinuity::Lipschitz(), 0.0), 1.0, 1e-14);
}

TEST(ModulusSeminorm, DegenerateSamples) {
  const FourierSeries f(1, 1, 1);
  EXPECT_THROW(ModulusSeminorm({{{0.0}, f}}, ModulusOfContinuity::Lipschitz(), 0.0), KamError);
  EXPECT_THROW(ModulusSeminorm({{{0.0}, f}, {{0.0}, f}}, ModulusOfContinuity::Lipschitz(), 0.0),
               KamError);
  EXPECT_THROW(ModulusSeminorm({{{0.0}, f}, {{2.0}, f}}, ModulusOfContinuity::Lipschitz(), 0.0),
               KamError);
}

}  // namespace
}  // namespace kamforge
