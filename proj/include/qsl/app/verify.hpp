#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qsl::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  int grid_n = 512;
};

/// Oracle/grid cross-validation. Each check is reported through on_result as it finishes.
std::vector<CheckResult> verify_all(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace qsl::app
