#pragma once

#include <string>
#include <vector>

namespace pqe {

// Exit codes: 0 success, 1 infeasible, 2 usage or I/O error, 3 timeout.
int run_cli(const std::vector<std::string>& args);

}  // namespace pqe
