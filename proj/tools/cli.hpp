#pragma once

namespace mlab::cli {

/// Exit codes: 0 success, 1 validation error, 2 a check failed (a verdict on
/// the wrong side of its threshold, a Monte-Carlo estimate outside 3 standard
/// errors, or a failed acceptance criterion).
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;
inline constexpr int kCheckFailed = 2;

int run(int argc, const char* const* argv);

}  // namespace mlab::cli
