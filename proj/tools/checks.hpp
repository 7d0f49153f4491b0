#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hamwave::checks {

struct CheckResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  ///< measured values against their thresholds
  double seconds = 0.0;
};

/// The eleven acceptance criteria, in order. Each check catches its own errors
/// and reports them as a failure. `on_done` is called after each check.
std::vector<CheckResult> run_acceptance(const std::function<void(const CheckResult&)>& on_done = {});

/// "PASS  7  PV branch ... (detail)".
std::string format_line(const CheckResult& r);

}  // namespace hamwave::checks
