#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctlcalc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kBottom = 2,
  kStuck = 3,
  kFuel = 4,
  kDisagree = 5,
};

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ctlcalc::cli
