#pragma once

namespace batchbald {

// Full command-line surface. Exit codes are a stable contract:
// 0 success, 1 property violation, 2 format error, 3 validation error,
// 4 domain error (bad flags included).
int run_cli(int argc, const char* const* argv);

}  // namespace batchbald
