#include "kamforge/fourier.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int IntPow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::shared_ptr<const ModeTable> BuildModeTable(int dim, int cutoff) {
  auto table = std::make_shared<ModeTable>();
  table->dim = dim;
  table->cutoff = cutoff;
  const int width = 2 * cutoff + 1;
  const int total = IntPow(width, dim);
  table->lookup.assign(total, -1);
  std::vector<int> k(dim);
  int count = 0;
  for (int offset = 0; offset < total; ++offset) {
    int rem = offset;
    for (int a = dim - 1; a >= 0; --a) {
      k[a] = rem % width - cutoff;
      rem /= width;
    }
    if (L1Norm(k) > cutoff) continue;
    table->lookup[offset] = count++;
    table->flat.insert(table->flat.end(), k.begin(), k.end());
  }
  return table;
}

// exp(sign * 2*pi*i*m/N) for m = 0..N-1, from exact fractions.
std::vector<Complex> Twiddles(int n, double sign) {
  std::vector<Complex> t(n);
  for (int m = 0; m < n; ++m) {
    const double angle = kTwoPi * static_cast<double>(m) / n;
    t[m] = Complex(std::cos(angle), sign * std::sin(angle));
  }
  return t;
}

// out[.., r, .., c] = sum_j kernel[r * old + j] * in[.., j, .., c].
std::vector<Complex> ApplyAlongAxis(const std::vector<Complex>& in,
                                    std::vector<int>& extents, int value_dim,
                                    int axis, int new_extent,
                                    const std::vector<Complex>& kernel) {
  const int old_extent = extents[axis];
  int outer = 1;
  for (int a = 0; a < axis; ++a) outer *= extents[a];
  int inner = value_dim;
  for (int a = axis + 1; a < static_cast<int>(extents.size()); ++a) {
    inner *= extents[a];
  }
  std::vector<Complex> out(static_cast<size_t>(outer) * new_extent * inner);
  for (int o = 0; o < outer; ++o) {
    const Complex* src = in.data() + static_cast<size_t>(o) * old_extent * inner;
    Complex* dst = out.data() + static_cast<size_t>(o) * new_extent * inner;
    for (int r = 0; r < new_extent; ++r) {
      Complex* row = dst + static_cast<size_t>(r) * inner;
      const Complex* w = kernel.data() + static_cast<size_t>(r) * old_extent;
      for (int j = 0; j < old_extent; ++j) {
        const Complex wj = w[j];
        const Complex* col = src + static_cast<size_t>(j) * inner;
        for (int i = 0; i < inner; ++i) row[i] += wj * col[i];
      }
    }
  }
  extents[axis] = new_extent;
  return out;
}

}  // namespace

int L1Norm(std::span<const int> k) {
  int s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

int ModeTable::IndexOf(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim || L1Norm(k) > cutoff) return -1;
  const int width = 2 * cutoff + 1;
  int offset = 0;
  for (int a = 0; a < dim; ++a) offset = offset * width + (k[a] + cutoff);
  return lookup[offset];
}

std::shared_ptr<const ModeTable> GetModeTable(int dim, int cutoff) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const ModeTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, cutoff}];
  if (!slot) slot = BuildModeTable(dim, cutoff);
  return slot;
}

FourierSeries::FourierSeries(int dim, int value_dim, int cutoff, bool real_valued)
    : dim_(dim), value_dim_(value_dim), cutoff_(cutoff), real_valued_(real_valued) {
  if (dim < 1 || value_dim < 1 || cutoff < 0) {
    throw KamError(ErrorKind::kInvalidArgument, "bad FourierSeries shape");
  }
  modes_ = GetModeTable(dim, cutoff);
  const std::vector<int> zero(dim, 0);
  zero_index_ = modes_->IndexOf(zero);
  coeffs_.assign(static_cast<size_t>(num_modes()) * value_dim, Complex(0.0, 0.0));
}

FourierSeries FourierSeries::FromEntries(
    int dim, int value_dim, int cutoff,
    const std::vector<std::pair<MultiIndex, std::vector<Complex>>>& entries,
    bool real_valued) {
  FourierSeries f(dim, value_dim, cutoff, real_valued);
  for (const auto& [k, values] : entries) {
    const int idx = f.IndexOf(k);
    if (idx < 0 || static_cast<int>(values.size()) != value_dim) {
      throw KamError(ErrorKind::kInvalidArgument, "entry outside series shape");
    }
    for (int c = 0; c < value_dim; ++c) f.set_coeff(idx, c, values[c]);
  }
  if (real_valued) {
    double scale = 1.0;
    for (const Complex& c : f.coeffs_) scale = std::max(scale, std::abs(c));
    if (f.HermitianDefect() > 1e-12 * scale) {
      throw KamError(ErrorKind::kInvalidArgument,
                     "real-valued series must have Hermitian coefficients");
    }
  }
  return f;
}

Complex FourierSeries::Coeff(std::span<const int> k, int component) const {
  const int idx = IndexOf(k);
  return idx < 0 ? Complex(0.0, 0.0) : coeff(idx, component);
}

void FourierSeries::SetCoeff(std::span<const int> k, int component, Complex v) {
  const int idx = IndexOf(k);
  if (idx < 0) throw KamError(ErrorKind::kInvalidArgument, "mode outside cutoff");
  set_coeff(idx, component, v);
}

double FourierSeries::HermitianDefect() const {
  double worst = 0.0;
  std::vector<int> neg(dim_);
  for (int i = 0; i < num_modes(); ++i) {
    const auto k = mode(i);
    for (int a = 0; a < dim_; ++a) neg[a] = -k[a];
    const int j = IndexOf(neg);
    for (int c = 0; c < value_dim_; ++c) {
      worst = std::max(worst, std::abs(coeff(i, c) - std::conj(coeff(j, c))));
    }
  }
  return worst;
}

void FourierSeries::Symmetrize() {
  std::vector<int> neg(dim_);
  for (int i = 0; i < num_modes(); ++i) {
    const auto k = mode(i);
    for (int a = 0; a < dim_; ++a) neg[a] = -k[a];
    const int j = IndexOf(neg);
    if (j < i) continue;
    for (int c = 0; c < value_dim_; ++c) {
      if (j == i) {
        set_coeff(i, c, Complex(coeff(i, c).real(), 0.0));
      } else {
        const Complex avg = 0.5 * (coeff(i, c) + std::conj(coeff(j, c)));
        set_coeff(i, c, avg);
        set_coeff(j, c, std::conj(avg));
      }
    }
  }
  real_valued_ = true;
}

std::vector<Complex> FourierSeries::Evaluate(std::span<const Complex> point) const {
  std::vector<Complex> out(value_dim_, Complex(0.0, 0.0));
  const int width = 2 * cutoff_ + 1;
  std::vector<Complex> powers(static_cast<size_t>(dim_) * width);
  for (int a = 0; a < dim_; ++a) {
    for (int m = -cutoff_; m <= cutoff_; ++m) {
      powers[a * width + m + cutoff_] = std::exp(Complex(0.0, m) * point[a]);
    }
  }
  for (int i = 0; i < num_modes(); ++i) {
    const auto k = mode(i);
    Complex e(1.0, 0.0);
    for (int a = 0; a < dim_; ++a) e *= powers[a * width + k[a] + cutoff_];
    for (int c = 0; c < value_dim_; ++c) out[c] += coeff(i, c) * e;
  }
  return out;
}

void FourierSeries::EvaluateReal(std::span<const double> point, std::span<double> value,
                                 std::span<double> jacobian) const {
  const int width = 2 * cutoff_ + 1;
  Complex small[16];
  std::vector<Complex> big;
  Complex* powers = small;
  if (dim_ * width > 16) {
    big.resize(static_cast<size_t>(dim_) * width);
    powers = big.data();
  }
  for (int a = 0; a < dim_; ++a) {
    for (int m = -cutoff_; m <= cutoff_; ++m) {
      powers[a * width + m + cutoff_] = std::polar(1.0, m * point[a]);
    }
  }
  std::fill(value.begin(), value.end(), 0.0);
  const bool want_jac = !jacobian.empty();
  if (want_jac) std::fill(jacobian.begin(), jacobian.end(), 0.0);
  for (int i = 0; i < num_modes(); ++i) {
    const auto k = mode(i);
    Complex e(1.0, 0.0);
    for (int a = 0; a < dim_; ++a) e *= powers[a * width + k[a] + cutoff_];
    for (int c = 0; c < value_dim_; ++c) {
      const Complex t = coeff(i, c) * e;
      value[c] += t.real();
      if (want_jac) {
        // d/dtheta_a of t is i*k_a*t, whose real part is -k_a*Im(t).
        for (int a = 0; a < dim_; ++a) jacobian[c * dim_ + a] -= k[a] * t.imag();
      }
    }
  }
}

FourierSeries FourierSeries::WithCutoff(int cutoff) const {
  FourierSeries out(dim_, value_dim_, cutoff, real_valued_);
  for (int i = 0; i < num_modes(); ++i) {
    const int j = out.IndexOf(mode(i));
    if (j < 0) continue;
    for (int c = 0; c < value_dim_; ++c) out.set_coeff(j, c, coeff(i, c));
  }
  return out;
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  if (other.dim_ != dim_ || other.value_dim_ != value_dim_) {
    throw KamError(ErrorKind::kInvalidArgument, "series shape mismatch");
  }
  if (other.cutoff_ > cutoff_) *this = WithCutoff(other.cutoff_);
  for (int i = 0; i < other.num_modes(); ++i) {
    const int j = IndexOf(other.mode(i));
    for (int c = 0; c < value_dim_; ++c) {
      coeffs_[j * value_dim_ + c] += other.coeff(i, c);
    }
  }
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  FourierSeries neg = other;
  neg *= -1.0;
  return *this += neg;
}

FourierSeries& FourierSeries::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
FourierSeries operator*(double s, FourierSeries a) { return a *= s; }

int UniformGrid::num_points() const { return IntPow(points_per_axis, dim); }

void UniformGrid::Point(int p, std::span<double> out) const {
  for (int a = dim - 1; a >= 0; --a) {
    out[a] = kTwoPi * static_cast<double>(p % points_per_axis) / points_per_axis;
    p /= points_per_axis;
  }
}

int CompositionGridSize(int cutoff) { return std::max(2 * cutoff + 2, 4 * cutoff); }

FourierSeries Analyze(const UniformGrid& grid, int value_dim,
                      std::span<const Complex> samples, int cutoff,
                      bool real_valued) {
  const int n = grid.points_per_axis;
  if (n < 2 * cutoff + 2) {
    throw KamError(ErrorKind::kGridTooCoarse,
                   "need N >= 2K+2 points per axis, got N=" + std::to_string(n) +
                       " for K=" + std::to_string(cutoff));
  }
  if (samples.size() != static_cast<size_t>(grid.num_points()) * value_dim) {
    throw KamError(ErrorKind::kInvalidArgument, "sample count does not match grid");
  }
  const int width = 2 * cutoff + 1;
  const std::vector<Complex> tw = Twiddles(n, -1.0);
  std::vector<Complex> kernel(static_cast<size_t>(width) * n);
  for (int r = 0; r < width; ++r) {
    const int k = r - cutoff;
    for (int j = 0; j < n; ++j) {
      const int m = ((k * j) % n + n) % n;
      kernel[static_cast<size_t>(r) * n + j] = tw[m] / static_cast<double>(n);
    }
  }
  std::vector<int> extents(grid.dim, n);
  std::vector<Complex> data(samples.begin(), samples.end());
  for (int a = grid.dim - 1; a >= 0; --a) {
    data = ApplyAlongAxis(data, extents, value_dim, a, width, kernel);
  }
  FourierSeries f(grid.dim, value_dim, cutoff, real_valued);
  const auto table = GetModeTable(grid.dim, cutoff);
  for (int offset = 0; offset < static_cast<int>(table->lookup.size()); ++offset) {
    const int idx = table->lookup[offset];
    if (idx < 0) continue;
    for (int c = 0; c < value_dim; ++c) {
      f.set_coeff(idx, c, data[static_cast<size_t>(offset) * value_dim + c]);
    }
  }
  if (real_valued) f.Symmetrize();
  return f;
}

FourierSeries AnalyzeReal(const UniformGrid& grid, int value_dim,
                          std::span<const double> samples, int cutoff) {
  std::vector<Complex> z(samples.begin(), samples.end());
  return Analyze(grid, value_dim, z, cutoff, true);
}

std::vector<Complex> SynthesizeGrid(const FourierSeries& f, const UniformGrid& grid,
                                    std::span<const double> imag_shift) {
  const int n = grid.points_per_axis;
  const int cutoff = f.cutoff();
  const int width = 2 * cutoff + 1;
  const int vd = f.value_dim();
  const auto table = GetModeTable(f.dim(), cutoff);
  std::vector<Complex> data(table->lookup.size() * vd, Complex(0.0, 0.0));
  for (int offset = 0; offset < static_cast<int>(table->lookup.size()); ++offset) {
    const int idx = table->lookup[offset];
    if (idx < 0) continue;
    for (int c = 0; c < vd; ++c) data[static_cast<size_t>(offset) * vd + c] = f.coeff(idx, c);
  }
  const std::vector<Complex> tw = Twiddles(n, 1.0);
  std::vector<int> extents(f.dim(), width);
  for (int a = f.dim() - 1; a >= 0; --a) {
    const double s = imag_shift.empty() ? 0.0 : imag_shift[a];
    std::vector<Complex> kernel(static_cast<size_t>(n) * width);
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < width; ++r) {
        const int k = r - cutoff;
        const int m = ((k * j) % n + n) % n;
        kernel[static_cast<size_t>(j) * width + r] = tw[m] * std::exp(-k * s);
      }
    }
    data = ApplyAlongAxis(data, extents, vd, a, n, kernel);
  }
  return data;
}

std::vector<Complex> Synthesize(const FourierSeries& f, std::span<const Complex> points) {
  const int dim = f.dim();
  const size_t count = points.size() / dim;
  std::vector<Complex> out;
  out.reserve(count * f.value_dim());
  for (size_t p = 0; p < count; ++p) {
    const auto v = f.Evaluate(points.subspan(p * dim, dim));
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

double StripNorm(const FourierSeries& f, double h, StripNormFlavor flavor) {
  if (h < 0.0) throw KamError(ErrorKind::kInvalidArgument, "strip width must be >= 0");
  const int vd = f.value_dim();
  if (flavor == StripNormFlavor::kCoeffWeighted) {
    double best = 0.0;
    for (int c = 0; c < vd; ++c) {
      double sum = 0.0;
      for (int i = 0; i < f.num_modes(); ++i) {
        sum += std::abs(f.coeff(i, c)) * std::exp(L1Norm(f.mode(i)) * h);
      }
      best = std::max(best, sum);
    }
    return best;
  }
  UniformGrid grid{f.dim(), std::max(8, 4 * f.cutoff())};
  const int corners = h > 0.0 ? (1 << f.dim()) : 1;
  std::vector<double> shift(f.dim(), 0.0);
  double best = 0.0;
  for (int corner = 0; corner < corners; ++corner) {
    for (int a = 0; a < f.dim(); ++a) shift[a] = h > 0.0 ? ((corner >> a) & 1 ? h : -h) : 0.0;
    for (const Complex& v : SynthesizeGrid(f, grid, shift)) best = std::max(best, std::abs(v));
  }
  return best;
}

Truncation Truncate(const FourierSeries& f, int cutoff, double h) {
  if (cutoff > f.cutoff()) {
    throw KamError(ErrorKind::kInvalidArgument, "truncation cutoff exceeds series cutoff");
  }
  Truncation t;
  t.truncated = f.WithCutoff(cutoff);
  const int vd = f.value_dim();
  t.mean.resize(vd);
  for (int c = 0; c < vd; ++c) {
    t.mean[c] = f.coeff(f.ZeroIndex(), c);
    t.truncated.set_coeff(t.truncated.ZeroIndex(), c, Complex(0.0, 0.0));
  }
  for (int c = 0; c < vd; ++c) {
    double sum = 0.0;
    for (int i = 0; i < f.num_modes(); ++i) {
      const int k1 = L1Norm(f.mode(i));
      if (k1 > cutoff) sum += std::abs(f.coeff(i, c)) * std::exp(k1 * h);
    }
    t.remainder_norm = std::max(t.remainder_norm, sum);
  }
  return t;
}

double ModulusSeminorm(const std::vector<ParameterSample>& samples,
                       const ModulusOfContinuity& w, double h, StripNormFlavor flavor) {
  if (samples.size() < 2) {
    throw KamError(ErrorKind::kDegenerateSampleSet, "need at least two parameter samples");
  }
  double best = 0.0;
  bool any_pair = false;
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = i + 1; j < samples.size(); ++j) {
      double dist = 0.0;
      for (size_t a = 0; a < samples[i].parameter.size(); ++a) {
        dist += std::abs(samples[i].parameter[a] - samples[j].parameter[a]);
      }
      if (!(dist > 0.0) || dist > 1.0) continue;
      any_pair = true;
      const FourierSeries diff = samples[i].series - samples[j].series;
      best = std::max(best, StripNorm(diff, h, flavor) / w(dist));
    }
  }
  if (!any_pair) {
    throw KamError(ErrorKind::kDegenerateSampleSet, "no pair with 0 < |dxi| <= 1");
  }
  return best;
}

}  // namespace kamforge
