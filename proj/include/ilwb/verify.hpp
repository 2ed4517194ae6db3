#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilwb/json_io.hpp"

namespace ilwb {

struct RunConfig {
  int universeCap = 3;
  long long budget = 1000000;  // morphism / enumeration work bound
  uint64_t seed = 0;
  enum class Format { Text, Json } outputFormat = Format::Text;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // first counterexample or summary counts
};

struct VerifyReport {
  std::string suite;
  int cap = 0;
  uint64_t seed = 0;
  std::vector<VerifyCheck> checks;

  int passCount() const;
  int failCount() const;
  bool allPass() const { return failCount() == 0; }
};

// Suites: morley, pretopos, groupoid, vaught, definability, interp, all.
// Deterministic given the config seed; throws BudgetExceeded when the cap
// does not fit the budget.
VerifyReport runVerifySuite(const RunConfig& config, const std::string& suite);

std::string reportToText(const VerifyReport& report);
Json reportToJson(const VerifyReport& report);

} // namespace ilwb
