#ifndef KAMFORGE_TOOLS_RUN_CONFIG_H_
#define KAMFORGE_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kamforge/engine.h"
#include "kamforge/testbed.h"

namespace kamforge::cli {

inline constexpr int kSchemaVersion = 1;

// Parsed and validated run configuration.
struct RunConfig {
  std::string model;
  ModelOverrides overrides;
  EngineConfig engine;
  std::string source;  // file name, for messages
};

// Parses a JSON document. Throws KamError(kConfigError) with
// "<source>:<line>: <field>: <message>" on any problem.
RunConfig ParseRunConfig(const std::string& text, const std::string& source = "<config>");
RunConfig LoadRunConfig(const std::string& path);

// "eps=1e-5..1e-3:geometric:5" or "eps=0..0.1:linear:11".
struct SweepSpec {
  std::string variable;
  std::vector<double> values;
};

SweepSpec ParseSweep(const std::string& text);

}  // namespace kamforge::cli

#endif  // KAMFORGE_TOOLS_RUN_CONFIG_H_
