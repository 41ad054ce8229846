#pragma once

// Command-line front end. Exit codes: 0 success, 1 unexpected failure,
// 2 config/usage, 3 I/O or malformed input, 4 numerical failure.

namespace tsg::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kNumeric = 4 };

int run(int argc, char** argv);

}  // namespace tsg::cli
