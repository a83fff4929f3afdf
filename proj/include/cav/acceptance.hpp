#pragma once

#include <string>
#include <vector>

namespace cav {

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the acceptance suite. With a non-empty `only` list, restricts to the
/// given criterion ids (1-10). Each criterion catches its own exceptions and
/// reports them as failures.
std::vector<Criterion> run_acceptance(const std::vector<int>& only = {});

}  // namespace cav
