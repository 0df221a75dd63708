#pragma once

namespace dhnet {

// Entry point behind the `dhnet` binary. Exit codes: 0 success,
// 1 validation failure, 2 usage or runtime error.
int run_cli(int argc, const char* const* argv);

} // namespace dhnet
