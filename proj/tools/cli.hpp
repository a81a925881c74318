#pragma once

#include <iosfwd>

namespace mf::cli {

inline constexpr const char* kToolName = "mfree";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNoMixedQuestions = 3,
  kGridUnderfull = 4,
  kDegenerate = 5,
};

/// Runs one command line; never calls exit().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mf::cli
