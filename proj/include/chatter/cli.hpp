#pragma once

#include <iosfwd>

namespace chatter::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kDomainError = 2,
  kUnstable = 3,
  kContourTooClose = 4,
};

/// Entry point of the `chatter` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chatter::cli
