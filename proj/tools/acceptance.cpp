#include <iostream>

#include "hallci/transform.hpp"
#include "suite.hpp"

// One line per criterion; exit 0 iff every criterion passes.
int main() {
  hallci::set_thread_cap(1);
  hallci::cli::SuiteOptions opt;
  opt.on_result = [](const hallci::cli::CriterionResult& r) { std::cout << hallci::cli::format_line(r) << std::endl; };
  const auto results = hallci::cli::run_suite(opt);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
