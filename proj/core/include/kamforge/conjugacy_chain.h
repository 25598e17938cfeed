#ifndef KAMFORGE_CONJUGACY_CHAIN_H_
#define KAMFORGE_CONJUGACY_CHAIN_H_

#include <optional>
#include <span>
#include <vector>

#include "kamforge/fourier.h"
#include "kamforge/frequency_solver.h"

namespace kamforge {

// One factor of the accumulated transformation. On angles it acts as
// x -> x + U(x). When an action part is present the factor is the
// cotangent lift of that circle map about `center`, followed by the fiber
// translation V:
//   y -> center + (I + DU(x))^{-T} (y - center) + V(x),
// which keeps area-preserving maps area-preserving after conjugation.
struct ChainPart {
  FourierSeries angle;
  std::optional<FourierSeries> action;
  std::vector<double> center;
};

// W = P_1 o P_2 o ... o P_L, applied right to left.
class ConjugacyChain {
 public:
  explicit ConjugacyChain(int dim = 1) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(parts_.size()); }
  const std::vector<ChainPart>& parts() const { return parts_; }
  TranslationLedger& translations() { return translations_; }
  const TranslationLedger& translations() const { return translations_; }

  void Append(FourierSeries angle_part);
  void Append(FourierSeries angle_part, FourierSeries action_part,
              std::vector<double> center);

  void MapAngles(std::span<const double> phi, std::span<double> theta) const;
  void MapPoint(std::span<const double> phi, std::span<const double> s,
                std::span<double> theta, std::span<double> r) const;

  // Newton inversion factor by factor; throws InversionFailure if a factor
  // needs more than 25 iterations. Returns the largest iteration count used.
  int InvertAngles(std::span<const double> theta, std::span<double> phi) const;
  int InvertPoint(std::span<const double> theta, std::span<const double> r,
                  std::span<double> phi, std::span<double> s) const;

 private:
  int InvertFactor(const ChainPart& part, std::span<double> x,
                   std::span<double> jac) const;

  int dim_;
  std::vector<ChainPart> parts_;
  TranslationLedger translations_;
};

inline constexpr int kMaxInversionIterations = 25;

}  // namespace kamforge

#endif  // KAMFORGE_CONJUGACY_CHAIN_H_
