// Acceptance gate: one line per criterion, nonzero exit if any fails.
// DISTFLOW_ACCEPTANCE_LEVEL=full runs the full Monte Carlo sizes; the
// default quick level keeps the same pass/fail structure at smaller M.

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "distflow/acceptance.hpp"

int main(int argc, char** argv) {
  distflow::AcceptanceOptions options;
  options.quick = true;
  const char* level = std::getenv("DISTFLOW_ACCEPTANCE_LEVEL");
  if (level != nullptr && std::strcmp(level, "full") == 0) options.quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) options.quick = false;
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
  }
  const char* workers = std::getenv("DISTFLOW_ACCEPTANCE_WORKERS");
  if (workers != nullptr) options.workers = std::max(1, std::atoi(workers));

  auto results = distflow::run_acceptance(options);
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.number << ": "
              << r.name;
    if (!r.details.empty()) std::cout << " [" << r.details << "]";
    std::cout << "\n";
    if (!r.pass) ++failures;
  }
  std::cout << (failures == 0 ? "acceptance: all criteria passed"
                              : "acceptance: FAILURES") << " ("
            << results.size() - static_cast<std::size_t>(failures) << "/"
            << results.size() << ")\n";
  return failures == 0 ? 0 : 1;
}
