#ifndef KAMFORGE_SERIALIZE_H_
#define KAMFORGE_SERIALIZE_H_

#include <string>

#include "kamforge/conjugacy_chain.h"
#include "kamforge/fourier.h"
#include "kamforge/kam_param.h"
#include "kamforge/kam_twist.h"

namespace kamforge {

// {"dim", "value_dim", "cutoff", "real_valued", "entries": [[k..., [re, im]...], ...]}
// Only nonzero coefficients are written.
std::string SeriesToJson(const FourierSeries& f);
FourierSeries SeriesFromJson(const std::string& text);

std::string ChainToJson(const ConjugacyChain& chain);
ConjugacyChain ChainFromJson(const std::string& text);

// Result records; `indent` < 0 gives compact output.
std::string ParamResultToJson(const ParamResult& result, const ParamMapModel& model,
                              int indent = 2);
std::string TwistResultToJson(const TwistResult& result, const TwistMapModel& model,
                              int indent = 2);

}  // namespace kamforge

#endif  // KAMFORGE_SERIALIZE_H_
