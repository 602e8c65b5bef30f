#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace phaselens::cli {

inline constexpr int kExitPhaseRetrieval = 0;
inline constexpr int kExitNotPhaseRetrieval = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitCapExceeded = 65;
inline constexpr int kExitMath = 66;
inline constexpr int kExitInternal = 70;

struct ScenarioCheck {
  std::string name;
  std::string expected;
  std::string observed;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<ScenarioCheck> checks;
  bool pass() const;
};

const std::vector<std::string>& scenario_names();

/// Runs a named reproduction scenario. InvalidArgument for unknown names.
ScenarioReport run_scenario(const std::string& name, std::uint64_t seed);

/// Entry point; `args` excludes the program name. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phaselens::cli
