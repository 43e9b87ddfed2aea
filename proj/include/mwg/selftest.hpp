#pragma once

#include <string>
#include <vector>

namespace mwg {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite (a few seconds): theory identities, optimal
/// acceptance constants, gradient and precision-form checks, kernel
/// symmetries, determinism, and small stationarity audits.
std::vector<SelfTestResult> run_selftest();

}  // namespace mwg
