#pragma once

#include <ostream>

namespace iikl::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Entry point of the iikl command-line tool. Errors are reported on `err` as
// one JSON object {"error": {"kind": ..., "message": ...}}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iikl::app
