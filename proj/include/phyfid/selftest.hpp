#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phyfid {

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle checks over analytic fields, quaternion identities and the flow
/// estimator. Prints one line per case.
std::vector<SelftestCase> run_selftest(std::ostream& out, bool color);

}  // namespace phyfid
