#pragma once

#include <ostream>

namespace robest {

// Bundled property suite over built-in scenarios; prints one line per check.
// Returns true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace robest
