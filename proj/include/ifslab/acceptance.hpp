#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ifslab::acceptance {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string name;
  double budget_s = 0.0;  // the criterion fails when it runs longer
  std::function<Outcome()> run;
};

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_s = 0.0;
};

const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `only` is empty), printing one line per
/// criterion to `live` as soon as it finishes.
std::vector<Result> run(const std::vector<int>& only, std::ostream* live);

std::string format_line(const Result& r);

}  // namespace ifslab::acceptance
