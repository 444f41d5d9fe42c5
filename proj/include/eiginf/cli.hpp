#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eiginf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRejected = 2;  // with --assert-null

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eiginf::cli
