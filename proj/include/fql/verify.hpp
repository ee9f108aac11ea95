#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fql {

// One verification suite outcome. `margin` is the worst slack observed
// toward the inequality being checked (negative = violation); suites whose
// property is exact equality report the largest absolute deviation instead,
// with `margin_is_deviation` set.
struct SuiteResult {
  std::string name;
  bool pass = false;
  std::uint64_t cases = 0;
  double margin = 0.0;
  bool margin_is_deviation = false;
  double seconds = 0.0;
};

std::vector<std::string> verify_suite_names();

// Runs one suite by name (throws on unknown names).
SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed);

std::vector<SuiteResult> run_all_verify_suites(std::uint64_t seed);

}  // namespace fql
