#ifndef CUSPEC_CLI_HPP
#define CUSPEC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cuspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitUsage = 64;

/// args[0] is the program name. Results go to `out` unless --output is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuspec::cli

#endif
