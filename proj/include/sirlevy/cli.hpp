#pragma once

namespace sirlevy {

/// Full command-line driver. Exit codes: 0 success, 1 usage error,
/// 2 config/validation error, 3 numerical failure.
int run_command(int argc, char** argv);

} // namespace sirlevy
