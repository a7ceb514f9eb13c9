#pragma once

#include <iosfwd>

namespace thetawh::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInvalidInput = 2,
  kNumericalError = 3,
};

/// roots | factor | sup-dist | verify | simulate
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thetawh::cli
