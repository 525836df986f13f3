#include <iostream>

#include "kmsync/selfcheck.hpp"

int main() {
  const auto results = kmsync::run_selfcheck();
  const int failures = kmsync::report_selfcheck(results, std::cout);
  if (failures != 0) {
    std::cout << failures << " check(s) failed\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}
