#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace distflow {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string details;  // observed vs expected, for the report line
};

struct AcceptanceOptions {
  std::uint64_t seed = 20260823;
  bool quick = false;  // reduced Monte Carlo sizes, same pass/fail structure
  int workers = 1;
};

/// The full acceptance battery; one entry per criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// One criterion by number (1-based); throws on unknown numbers.
CriterionResult run_criterion(int number, const AcceptanceOptions& options);

}  // namespace distflow
