#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kmsync {

struct CheckResult {
  std::string id;      // "3.2" style, criterion.sub
  std::string name;
  bool pass = false;
  std::string detail;  // measured vs expected values
};

// Runs the full verification suite: closed-form reference constants,
// exhaustive event counting, stability-rule cross-validation, diagram-data
// reproduction, dynamics runs and the convergence/property batteries. Group
// runtimes are checked against their budgets as part of the result set.
std::vector<CheckResult> run_selfcheck();

// Prints one line per check plus a rollup per criterion group; returns the
// number of failures.
int report_selfcheck(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace kmsync
