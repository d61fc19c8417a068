#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace binn::cli {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Deterministic oracle suite: quadrature cross-checks, free-term identities,
// analytic plug-in residuals and the BEM oracle against closed forms.
std::vector<CheckResult> run_verify_suite();

void print_table(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace binn::cli
