#ifndef KAMFORGE_FOURIER_H_
#define KAMFORGE_FOURIER_H_

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "kamforge/modulus.h"

namespace kamforge {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

int L1Norm(std::span<const int> k);

// All k in Z^dim with |k|_1 <= cutoff, in lexicographic order.
struct ModeTable {
  int dim = 0;
  int cutoff = 0;
  std::vector<int> flat;      // num_modes * dim entries
  std::vector<int> lookup;    // (2K+1)^dim dense offsets, -1 outside the ball
  int num_modes() const { return dim == 0 ? 0 : static_cast<int>(flat.size()) / dim; }
  std::span<const int> mode(int i) const { return {flat.data() + i * dim, static_cast<size_t>(dim)}; }
  int IndexOf(std::span<const int> k) const;
};

// Cached and shared between series of equal shape.
std::shared_ptr<const ModeTable> GetModeTable(int dim, int cutoff);

// Truncated Fourier series sum_k c_k exp(i<k,theta>) on T^dim, with
// value_dim components per coefficient.
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int dim, int value_dim, int cutoff, bool real_valued = true);

  // Builds a series from explicit (k, components) entries. Missing modes are
  // zero. Throws if real_valued is set and the entries are not Hermitian.
  static FourierSeries FromEntries(
      int dim, int value_dim, int cutoff,
      const std::vector<std::pair<MultiIndex, std::vector<Complex>>>& entries,
      bool real_valued);

  int dim() const { return dim_; }
  int value_dim() const { return value_dim_; }
  int cutoff() const { return cutoff_; }
  bool real_valued() const { return real_valued_; }
  int num_modes() const { return modes_ ? modes_->num_modes() : 0; }
  std::span<const int> mode(int i) const { return modes_->mode(i); }
  int IndexOf(std::span<const int> k) const { return modes_->IndexOf(k); }
  int ZeroIndex() const { return zero_index_; }

  Complex coeff(int mode_index, int component = 0) const {
    return coeffs_[mode_index * value_dim_ + component];
  }
  void set_coeff(int mode_index, int component, Complex v) {
    coeffs_[mode_index * value_dim_ + component] = v;
  }
  // Zero when k lies outside the stored ball.
  Complex Coeff(std::span<const int> k, int component = 0) const;
  void SetCoeff(std::span<const int> k, int component, Complex v);
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> mutable_coeffs() { return coeffs_; }

  double HermitianDefect() const;
  // Replaces c_k and c_-k by their Hermitian average and marks the series real.
  void Symmetrize();

  std::vector<Complex> Evaluate(std::span<const Complex> point) const;
  // Real part of the sum at a real point; jacobian is value_dim x dim row-major.
  void EvaluateReal(std::span<const double> point, std::span<double> value,
                    std::span<double> jacobian = {}) const;

  // Zero-padded or truncated copy.
  FourierSeries WithCutoff(int cutoff) const;

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(double s);

 private:
  int dim_ = 0;
  int value_dim_ = 0;
  int cutoff_ = 0;
  bool real_valued_ = true;
  int zero_index_ = 0;
  std::shared_ptr<const ModeTable> modes_;
  std::vector<Complex> coeffs_;
};

FourierSeries operator+(FourierSeries a, const FourierSeries& b);
FourierSeries operator-(FourierSeries a, const FourierSeries& b);
FourierSeries operator*(double s, FourierSeries a);

// Uniform grid with N points per axis, theta_j = 2*pi*j/N. Point p has
// multi-index digits in base N with axis 0 most significant.
struct UniformGrid {
  int dim = 1;
  int points_per_axis = 0;
  int num_points() const;
  // theta of point p, written to out (size dim).
  void Point(int p, std::span<double> out) const;
};

// Grid size used for compositions: max(2K+2, 4K).
int CompositionGridSize(int cutoff);

// Interpolant coefficients for |k|_1 <= cutoff. samples holds
// num_points * value_dim values, point-major.
FourierSeries Analyze(const UniformGrid& grid, int value_dim,
                      std::span<const Complex> samples, int cutoff,
                      bool real_valued);
FourierSeries AnalyzeReal(const UniformGrid& grid, int value_dim,
                          std::span<const double> samples, int cutoff);

// Values on `grid` shifted by i*imag_shift (one entry per axis).
std::vector<Complex> SynthesizeGrid(const FourierSeries& f, const UniformGrid& grid,
                                    std::span<const double> imag_shift = {});

// Point-wise synthesis at complex angles; points holds dim entries per point.
std::vector<Complex> Synthesize(const FourierSeries& f, std::span<const Complex> points);

enum class StripNormFlavor { kGridSup, kCoeffWeighted };

double StripNorm(const FourierSeries& f, double h, StripNormFlavor flavor);

struct Truncation {
  FourierSeries truncated;       // modes 0 < |k|_1 <= K
  std::vector<Complex> mean;     // f_0 per component
  double remainder_norm = 0.0;   // coeff-weighted norm of discarded modes
};

Truncation Truncate(const FourierSeries& f, int cutoff, double h = 0.0);

struct ParameterSample {
  std::vector<double> parameter;
  FourierSeries series;
};

// max over pairs with 0 < |xi' - xi''|_1 <= 1 of
// StripNorm(f(xi') - f(xi''), h) / w(|xi' - xi''|_1).
double ModulusSeminorm(const std::vector<ParameterSample>& samples,
                       const ModulusOfContinuity& w, double h,
                       StripNormFlavor flavor = StripNormFlavor::kGridSup);

}  // namespace kamforge

#endif  // KAMFORGE_FOURIER_H_
