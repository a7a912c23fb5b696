#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hallci::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  // Machine-precision and bookkeeping parts only; trend checks never clear it.
  bool hard_ok = true;
  std::string detail;
  double seconds = 0;
};

struct SuiteOptions {
  std::uint64_t seed = 12345;
  std::vector<int> only;  // empty: all ten
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_suite(const SuiteOptions& opt);
std::string format_line(const CriterionResult& r);

}  // namespace hallci::cli
