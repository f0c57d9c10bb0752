#pragma once

#include <iosfwd>

namespace stale::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
inline constexpr int kDegenerate = 4;

/// Default output directory for `report`, overridable from the environment.
inline constexpr const char* kOutDirEnv = "STALE_OUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stale::cli
