#pragma once

#include <string>
#include <vector>

namespace sspec::verify {

struct Row {
  std::string suite, name;
  double measured = 0.0;
  double bound = 0.0;
  bool at_least = false;  // measured >= bound instead of measured <= bound
  bool pass = false;
};

// kernels | calculus | fracpow | all; throws ErrorKind::Parse for other names.
std::vector<Row> run_suite(const std::string& name);

}  // namespace sspec::verify
