#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dpskqkd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoRate = 3;

/// Whole command line, argv[0] included. Results go to `out` unless --out
/// names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpskqkd
