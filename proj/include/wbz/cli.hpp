#ifndef WBZ_CLI_HPP
#define WBZ_CLI_HPP

#include <iosfwd>

namespace wbz {

// Exit codes: 0 success, 1 mathematical failure (certification or checks),
// 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wbz

#endif
