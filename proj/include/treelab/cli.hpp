#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treelab {

// Exit codes:
//   0  success
//   1  invalid input or config (the message names the violated invariant)
//   2  legal negative outcome (no realization, no positive interval,
//      assumption (1) fails)
//   3  numerical non-convergence
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace treelab
