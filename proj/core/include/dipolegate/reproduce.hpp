#pragma once

// Recomputes every entry of the shipped reference table and compares it with
// its tolerance.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dipolegate/feasibility.hpp"

namespace dipolegate::reproduce {

struct Check {
  std::string id;
  std::string molecule;
  double computed = 0.0;
  double expected = 0.0;
  std::string unit;
  feasibility::Tolerance tolerance;
  bool passed = false;
  std::string note;
  // Set when the computation threw; `passed` is then false.
  std::optional<std::string> error;
};

// Value of one reference id in the unit of its expectation. Throws
// InvalidArgument for ids without a computation.
double compute(const feasibility::Expectation& expectation);

// Ids this module knows how to compute outside the feasibility reports.
std::vector<std::string> registered_ids();

Check check(const feasibility::Expectation& expectation);

// Runs `check` over the table, optionally keeping only ids with `prefix`.
std::vector<Check> run(const std::vector<feasibility::Expectation>& table,
                       std::string_view prefix = {});
std::vector<Check> run_all(std::string_view prefix = {});

}  // namespace dipolegate::reproduce
