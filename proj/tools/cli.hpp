#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace platoon::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kNumeric = 3,
  kSolver = 4,
  kIo = 5,
};

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace platoon::cli
