#pragma once

#include <iosfwd>

namespace perm::cli {

/// Exit status: 0 on success, 2 on usage or validation failure, 1 on internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace perm::cli
