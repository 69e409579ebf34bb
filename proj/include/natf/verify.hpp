#ifndef NATF_VERIFY_HPP
#define NATF_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace natf {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Built-in invariant suite: norm-potential sub-additivity over word splits,
/// mistake-ball monotonicity, exact mistake-cylinder counts vs brute force,
/// separated/spanning duality, singular-value determinant identity, and
/// Kingman monotone averages.
std::vector<CheckResult> verification_suite(std::uint64_t seed = 1);

}  // namespace natf

#endif
