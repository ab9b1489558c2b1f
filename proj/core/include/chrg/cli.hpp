#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chrg {

// Command-line front end. args excludes the program name.
// Exit codes: 0 ok (including a partial parse), 1 syntax or runtime
// error, 2 empty production, 3 no branch reached a fixpoint.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace chrg
