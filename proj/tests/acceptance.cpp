// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <iostream>

#include "checks.hpp"

int main() {
  int failed = 0;
  hamwave::checks::run_acceptance([&](const hamwave::checks::CheckResult& r) {
    std::cout << hamwave::checks::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed == 0 ? "all 11 criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
