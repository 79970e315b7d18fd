#ifndef SALSA_CLI_H_
#define SALSA_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace salsa {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitConfigError = 2;

// Runs the command line `args` (without the program name). Input "-" reads
// from `in`, output "-" writes to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace salsa

#endif  // SALSA_CLI_H_
