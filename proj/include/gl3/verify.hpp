// verify.hpp
//
// Property and acceptance batteries shared by the acceptance binary and the
// `gl3 verify` command.  Each suite returns one CheckResult.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gl3 {

struct VerifyOptions {
  int threads = 1;
  std::uint64_t seed = 20241015;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  long count = 0;          // individual comparisons made
  long failures = 0;
  double max_deviation = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// Suite names in acceptance order: kloosterman, vanishing, yz-policy,
// mollifier, ell1, script-w, weyl, kernels, truncation, stirling,
// first-moment, sigma6, eisenstein.
const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown name.
CheckResult run_suite(const std::string& name, const VerifyOptions& opt = {});

// Suites whose target cannot be met at desk scale; they report FAIL with
// their measurements (see README).
bool known_unattainable(const std::string& name);

}  // namespace gl3
