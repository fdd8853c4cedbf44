#pragma once

namespace tnt {

/// Command-line entry point. Exit codes: 0 success, 1 usage, 2 I/O or
/// format error, 3 verification failure.
int cli_main(int argc, const char* const* argv);

}  // namespace tnt
