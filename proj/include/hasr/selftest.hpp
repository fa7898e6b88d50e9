#pragma once

// Invariant checks bundled into the `selftest` subcommand. Output is a
// fixed-order table with no timings, so repeated runs are byte-identical.

#include <iosfwd>
#include <string>
#include <vector>

namespace hasr {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SelftestCheck> run_selftest();
void print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks);

}  // namespace hasr
