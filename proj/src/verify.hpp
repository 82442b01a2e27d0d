#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flode {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  // Perturbs one SNA entry inside the checks; the suites must then fail.
  bool inject_fault = false;
  // Instance counts scale with this factor (acceptance runs use 1).
  double scale = 1.0;
};

std::vector<std::string> verification_suites();

// Runs the named suites ("all" selects every one) and returns one result per
// suite. Unknown names raise invalid_argument.
std::vector<CheckResult> run_verification(const std::vector<std::string>& names,
                                          const VerifyOptions& options);

}  // namespace flode
