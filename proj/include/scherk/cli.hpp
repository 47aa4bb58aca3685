#pragma once

#include <string>
#include <vector>

namespace scherk {

// Entry point shared by the binary and the tests. Exit codes: 0 success /
// SATISFIED, 1 usage or parse errors, 2 VIOLATED verdicts or failed
// experiments, 3 numerical non-convergence or INCONCLUSIVE verdicts.
int run_cli(const std::vector<std::string>& args);

}  // namespace scherk
